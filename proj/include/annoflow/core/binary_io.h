// Copyright 2026 The Annoflow Authors.
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

#ifndef ANNOFLOW_CORE_BINARY_IO_H_
#define ANNOFLOW_CORE_BINARY_IO_H_

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace annoflow {

// Little-endian writer for parameter blobs.
class ByteWriter {
 public:
  void Magic(std::string_view magic) { Raw(magic.data(), magic.size()); }
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U32(std::uint32_t v) { Uint(v, 4); }
  void U64(std::uint64_t v) { Uint(v, 8); }
  void F32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    U32(bits);
  }
  void F64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    U64(bits);
  }
  // u32 length prefix followed by the bytes.
  void String(std::string_view s) {
    U32(static_cast<std::uint32_t>(s.size()));
    Raw(s.data(), s.size());
  }

  const std::vector<std::uint8_t> &bytes() const { return bytes_; }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  void Uint(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void Raw(const char *data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }

  std::vector<std::uint8_t> bytes_;
};

// Bounds-checked reader; throws Error(kParse) on truncated input.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes, std::string what = "blob")
      : bytes_(bytes), what_(std::move(what)) {}

  // Throws Error(kParse) when the next bytes differ from `magic`.
  void ExpectMagic(std::string_view magic);
  std::uint8_t U8();
  std::uint32_t U32();
  std::uint64_t U64();
  float F32();
  double F64();
  std::string String();

  bool AtEnd() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void Need(std::size_t n) const;
  std::uint64_t Uint(int width);

  std::span<const std::uint8_t> bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> ReadBinaryFile(const std::filesystem::path &path);
void WriteBinaryFile(const std::filesystem::path &path, std::span<const std::uint8_t> bytes);

// 64-bit FNV-1a. Not cryptographic; detects accidental corruption.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace annoflow

#endif  // ANNOFLOW_CORE_BINARY_IO_H_
