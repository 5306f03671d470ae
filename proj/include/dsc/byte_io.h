// Copyright 2026 The DSC Codec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian byte serialization shared by every on-disk and wire format.

#ifndef DSC_BYTE_IO_H_
#define DSC_BYTE_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsc/error.h"

namespace dsc {

class ByteWriter {
 public:
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U16(std::uint16_t v) { PutLE(v, 2); }
  void U32(std::uint32_t v) { PutLE(v, 4); }
  void U64(std::uint64_t v) { PutLE(v, 8); }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Tag(std::string_view magic) {
    bytes_.insert(bytes_.end(), magic.begin(), magic.end());
  }
  void Bytes(std::span<const std::uint8_t> b) {
    bytes_.insert(bytes_.end(), b.begin(), b.end());
  }

  std::size_t size() const { return bytes_.size(); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  void PutLE(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> bytes_;
};

// Bounds-checked reader; running off the end throws ErrorCode::kParse.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t U8() { return static_cast<std::uint8_t>(GetLE(1)); }
  std::uint16_t U16() { return static_cast<std::uint16_t>(GetLE(2)); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(GetLE(4)); }
  std::uint64_t U64() { return GetLE(8); }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }

  void ExpectTag(std::string_view magic) {
    Need(magic.size());
    if (std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) != 0) {
      throw Error(ErrorCode::kParse, "bad magic, expected \"" + std::string(magic) + "\"");
    }
    pos_ += magic.size();
  }

  std::span<const std::uint8_t> Bytes(std::size_t n) {
    Need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void ExpectEnd() const {
    if (remaining() != 0) {
      throw Error(ErrorCode::kParse, std::to_string(remaining()) + " trailing bytes");
    }
  }

 private:
  void Need(std::size_t n) const {
    if (remaining() < n) {
      throw Error(ErrorCode::kParse, "unexpected end of data at byte " + std::to_string(pos_));
    }
  }

  std::uint64_t GetLE(int n) {
    Need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace dsc

#endif  // DSC_BYTE_IO_H_
