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

#include "admatch/common/binary_io.hpp"

#include <bit>
#include <cstring>

#include "admatch/common/error.hpp"

namespace admatch::io {
namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw FormatError("cannot open for writing: " + path.string());
}

void BinaryWriter::write_magic(std::string_view magic) {
  if (magic.size() != 8) throw FormatError("magic must be 8 bytes");
  out_.write(magic.data(), 8);
}

void BinaryWriter::write_u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

void BinaryWriter::write_u32(std::uint32_t v) {
  v = to_little(v);
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::write_u64(std::uint64_t v) {
  v = to_little(v);
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::write_f64(double v) { write_u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::write_string(std::string_view s) {
  write_u64(s.size());
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::write_f64s(std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out_.write(reinterpret_cast<const char*>(values.data()),
               static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (double v : values) write_f64(v);
  }
}

void BinaryWriter::write_bytes(std::span<const std::uint8_t> bytes) {
  out_.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
}

void BinaryWriter::finish() {
  out_.flush();
  if (!out_) throw FormatError("write failed: " + path_.string());
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw FormatError("cannot open for reading: " + path.string());
}

void BinaryReader::read_raw(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw FormatError("truncated file: " + path_.string());
  }
}

void BinaryReader::expect_magic(std::string_view magic) {
  char buf[8];
  read_raw(buf, 8);
  if (std::string_view(buf, 8) != magic) {
    throw FormatError("bad magic in " + path_.string() + ", expected " + std::string(magic));
  }
}

std::uint8_t BinaryReader::read_u8() {
  std::uint8_t v;
  read_raw(&v, 1);
  return v;
}

std::uint32_t BinaryReader::read_u32() {
  std::uint32_t v;
  read_raw(&v, sizeof v);
  return to_little(v);
}

std::uint64_t BinaryReader::read_u64() {
  std::uint64_t v;
  read_raw(&v, sizeof v);
  return to_little(v);
}

double BinaryReader::read_f64() { return std::bit_cast<double>(read_u64()); }

std::string BinaryReader::read_string() {
  const std::uint64_t n = read_u64();
  if (n > (1ULL << 32)) throw FormatError("implausible string length in " + path_.string());
  std::string s(n, '\0');
  read_raw(s.data(), n);
  return s;
}

std::vector<double> BinaryReader::read_f64s(std::size_t count) {
  std::vector<double> values(count);
  if constexpr (std::endian::native == std::endian::little) {
    read_raw(values.data(), count * sizeof(double));
  } else {
    for (auto& v : values) v = read_f64();
  }
  return values;
}

std::vector<std::uint8_t> BinaryReader::read_bytes(std::size_t count) {
  std::vector<std::uint8_t> bytes(count);
  read_raw(bytes.data(), count);
  return bytes;
}

void BinaryReader::expect_end() {
  if (in_.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes in " + path_.string());
  }
}

}  // namespace admatch::io
