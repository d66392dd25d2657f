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
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace admatch::io {

// Little-endian binary writer over a file. Every container format in the
// project (checkpoints, indexes, vector dumps, ad-part tables) goes through
// this pair so the byte layout is identical on every host.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);

  void write_magic(std::string_view magic);  // exactly 8 bytes
  void write_u8(std::uint8_t v);
  void write_u32(std::uint32_t v);
  void write_u64(std::uint64_t v);
  void write_f64(double v);
  void write_string(std::string_view s);  // u64 length + bytes
  void write_f64s(std::span<const double> values);
  void write_bytes(std::span<const std::uint8_t> bytes);

  // Flushes and throws FormatError if any write failed.
  void finish();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  // Throws FormatError when the next 8 bytes differ from `magic`.
  void expect_magic(std::string_view magic);
  std::uint8_t read_u8();
  std::uint32_t read_u32();
  std::uint64_t read_u64();
  double read_f64();
  std::string read_string();
  std::vector<double> read_f64s(std::size_t count);
  std::vector<std::uint8_t> read_bytes(std::size_t count);

  // Throws FormatError if unread bytes remain.
  void expect_end();

 private:
  void read_raw(void* dst, std::size_t n);

  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace admatch::io
