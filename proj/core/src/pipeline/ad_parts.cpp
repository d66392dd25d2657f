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

#include "admatch/pipeline/ad_parts.hpp"

#include <fmt/format.h>

#include "admatch/common/binary_io.hpp"
#include "admatch/common/error.hpp"

namespace admatch::pipeline {
namespace {
constexpr std::string_view kMagic = "ADMPART1";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void AdPartsTable::set(AdId ad_id, std::vector<double> part) {
  if (part.size() != width_) {
    throw DimensionError(fmt::format("ad part of width {} for a table of width {}", part.size(), width_));
  }
  parts_[ad_id] = std::move(part);
}

const std::vector<double>* AdPartsTable::find(AdId ad_id) const {
  auto it = parts_.find(ad_id);
  return it == parts_.end() ? nullptr : &it->second;
}

void AdPartsTable::save(const std::filesystem::path& path) const {
  io::BinaryWriter w(path);
  w.write_magic(kMagic);
  w.write_u32(kVersion);
  w.write_u64(width_);
  w.write_u64(parts_.size());
  for (const auto& [id, part] : parts_) {
    w.write_u64(id);
    w.write_f64s(part);
  }
  w.finish();
}

AdPartsTable AdPartsTable::load(const std::filesystem::path& path) {
  io::BinaryReader r(path);
  r.expect_magic(kMagic);
  if (const auto v = r.read_u32(); v != kVersion) {
    throw FormatError(fmt::format("{}: unsupported ad-parts version {}", path.string(), v));
  }
  AdPartsTable table(r.read_u64());
  const std::uint64_t count = r.read_u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    const AdId id = r.read_u64();
    table.set(id, r.read_f64s(table.width_));
  }
  r.expect_end();
  return table;
}

}  // namespace admatch::pipeline
