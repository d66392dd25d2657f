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

#include "admatch/pipeline/bidword_index.hpp"

#include <algorithm>
#include <cctype>

namespace admatch::pipeline {

std::string normalize_keyword(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

void BidwordIndex::add(AdId ad_id, std::span<const std::string> keywords) {
  for (const auto& k : keywords) {
    std::string key = normalize_keyword(k);
    if (key.empty()) continue;
    auto& ids = postings_[key];
    auto it = std::lower_bound(ids.begin(), ids.end(), ad_id);
    if (it == ids.end() || *it != ad_id) ids.insert(it, ad_id);
  }
}

BidwordIndex BidwordIndex::build(std::span<const dataio::AdDescriptor> ads) {
  BidwordIndex index;
  for (const auto& ad : ads) index.add(ad.ad_id, ad.bid_keywords);
  return index;
}

std::span<const AdId> BidwordIndex::lookup(std::string_view raw_query) const {
  auto it = postings_.find(normalize_keyword(raw_query));
  if (it == postings_.end()) return {};
  return it->second;
}

}  // namespace admatch::pipeline
