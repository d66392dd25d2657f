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
#include <filesystem>
#include <map>
#include <span>
#include <vector>

namespace admatch::pipeline {

using AdId = std::uint64_t;

// Ad-side partial products V_a W_a of the pre-rank first layer, keyed by ad.
class AdPartsTable {
 public:
  explicit AdPartsTable(std::size_t width = 0) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return parts_.size(); }

  // Throws DimensionError on a width mismatch; replaces existing entries.
  void set(AdId ad_id, std::vector<double> part);
  // nullptr when absent.
  const std::vector<double>* find(AdId ad_id) const;

  const std::map<AdId, std::vector<double>>& entries() const { return parts_; }

  void save(const std::filesystem::path& path) const;
  static AdPartsTable load(const std::filesystem::path& path);

 private:
  std::size_t width_;
  std::map<AdId, std::vector<double>> parts_;
};

}  // namespace admatch::pipeline
