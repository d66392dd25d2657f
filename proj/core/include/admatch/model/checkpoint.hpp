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

#include <filesystem>

#include "admatch/model/config.hpp"
#include "admatch/numkit/param_store.hpp"

namespace admatch::model {

// Versioned little-endian container:
//   magic "ADMCKPT1", u32 version,
//   string config (JSON), u64 tensor count,
//   per tensor: string name, u8 trainable, u8 frozen_row0, u32 rank,
//               u64 dims[rank], f64 values[prod(dims)].
// Strings are u64 length + bytes. Values round-trip bit-exactly.
struct Checkpoint {
  EncoderConfig config;
  numkit::ParamStore params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const EncoderConfig& config,
                     const numkit::ParamStore& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace admatch::model
