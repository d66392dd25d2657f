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

#include "admatch/model/checkpoint.hpp"

#include "admatch/common/binary_io.hpp"
#include "admatch/common/error.hpp"

namespace admatch::model {

namespace {
constexpr std::string_view kMagic = "ADMCKPT1";
}

void save_checkpoint(const std::filesystem::path& path, const EncoderConfig& config,
                     const numkit::ParamStore& params) {
  io::BinaryWriter w(path);
  w.write_magic(kMagic);
  w.write_u32(kCheckpointVersion);
  w.write_string(nlohmann::json(config).dump());
  w.write_u64(params.size());
  for (const auto& [name, p] : params) {
    w.write_string(name);
    w.write_u8(p.trainable ? 1 : 0);
    w.write_u8(p.frozen_row0 ? 1 : 0);
    w.write_u32(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.write_u64(d);
    w.write_f64s(p.value.data());
  }
  w.finish();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  io::BinaryReader r(path);
  r.expect_magic(kMagic);
  const std::uint32_t version = r.read_u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  try {
    ckpt.config = nlohmann::json::parse(r.read_string()).get<EncoderConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint config: ") + e.what());
  }
  const std::uint64_t count = r.read_u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.read_string();
    const bool trainable = r.read_u8() != 0;
    const bool frozen = r.read_u8() != 0;
    const std::uint32_t rank = r.read_u32();
    if (rank == 0 || rank > 4) throw FormatError("bad tensor rank for " + name);
    numkit::Shape shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = r.read_u64();
      if (d == 0 || d > (1ULL << 32)) throw FormatError("bad tensor dimension for " + name);
      n *= d;
    }
    ckpt.params.add(name, numkit::Tensor(std::move(shape), r.read_f64s(n)), trainable, frozen);
  }
  r.expect_end();
  return ckpt;
}

}  // namespace admatch::model
