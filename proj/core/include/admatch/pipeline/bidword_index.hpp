// Copyright 2026 The Admatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "admatch/dataio/log_record.hpp"

namespace admatch::pipeline {

using AdId = std::uint64_t;

// ASCII-lowercases, trims, and collapses internal whitespace runs to one
// space.
std::string normalize_keyword(std::string_view text);

// Exact-match inverted index from normalized bid keyword to ad ids.
class BidwordIndex {
 public:
  void add(AdId ad_id, std::span<const std::string> keywords);
  static BidwordIndex build(std::span<const dataio::AdDescriptor> ads);

  // Ads bidding on exactly this (normalized) query, ascending ids.
  std::span<const AdId> lookup(std::string_view raw_query) const;

  std::size_t keyword_count() const { return postings_.size(); }

 private:
  std::unordered_map<std::string, std::vector<AdId>> postings_;
};

}  // namespace admatch::pipeline
