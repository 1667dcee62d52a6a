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

#include "annoflow/core/binary_io.h"

#include <fstream>
#include <iterator>

#include "annoflow/core/error.h"

namespace annoflow {

void ByteReader::Need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) {
    throw Error(ErrorCode::kParse, "truncated data", what_);
  }
}

std::uint64_t ByteReader::Uint(int width) {
  Need(static_cast<std::size_t>(width));
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  }
  pos_ += static_cast<std::size_t>(width);
  return v;
}

void ByteReader::ExpectMagic(std::string_view magic) {
  Need(magic.size());
  for (std::size_t i = 0; i < magic.size(); ++i) {
    if (bytes_[pos_ + i] != static_cast<std::uint8_t>(magic[i])) {
      throw Error(ErrorCode::kParse, "bad magic, expected " + std::string(magic), what_);
    }
  }
  pos_ += magic.size();
}

std::uint8_t ByteReader::U8() { return static_cast<std::uint8_t>(Uint(1)); }
std::uint32_t ByteReader::U32() { return static_cast<std::uint32_t>(Uint(4)); }
std::uint64_t ByteReader::U64() { return Uint(8); }

float ByteReader::F32() {
  const std::uint32_t bits = U32();
  float v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

double ByteReader::F64() {
  const std::uint64_t bits = U64();
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

std::string ByteReader::String() {
  const std::uint32_t n = U32();
  Need(n);
  std::string s(reinterpret_cast<const char *>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> ReadBinaryFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open for reading", path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void WriteBinaryFile(const std::filesystem::path &path,
                     std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing", path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed", path.string());
}

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const std::uint8_t b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace annoflow
