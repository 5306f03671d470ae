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

// The per-link bitstream. Its serialized length is the reported rate, so
// every field below is counted.
//
// Wire layout, all little-endian:
//   "DSC1" | version u8 | flags u8 | C u16 | H u16 | W u16 | D u16 | K u16 |
//   precision u8 | codebook hash u64 | mask length u32 | mask bytes |
//   N u32 | K x u16 frequencies | payload length u32 | payload | state u32

#ifndef DSC_MESSAGE_H_
#define DSC_MESSAGE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsc/feature_map.h"
#include "dsc/rans.h"

namespace dsc {

inline constexpr std::uint8_t kMessageVersion = 1;

struct MessageHeader {
  std::uint8_t version = kMessageVersion;
  std::uint8_t flags = 0;  // reserved, must be zero
  std::uint16_t channels = 0;
  std::uint16_t height = 0;
  std::uint16_t width = 0;
  std::uint16_t embed_dim = 0;
  std::uint16_t codebook_size = 0;
  std::uint8_t precision = kDefaultPrecision;
  std::uint64_t codebook_hash = 0;

  bool operator==(const MessageHeader&) const = default;
};

struct Message {
  MessageHeader header;
  Mask mask;
  std::uint32_t symbol_count = 0;
  // K entries; all zero when symbol_count is zero.
  std::vector<std::uint16_t> frequencies;
  std::vector<std::uint8_t> payload;
  std::uint32_t final_state = kRansLowerBound;

  bool operator==(const Message&) const = default;
};

// Byte budget of each section; total equals the serialized length.
struct MessageLayout {
  std::size_t header = 0;  // fixed fields and the three length/count words
  std::size_t mask = 0;
  std::size_t table = 0;
  std::size_t payload = 0;
  std::size_t state = 0;

  std::size_t total() const { return header + mask + table + payload + state; }
};

inline constexpr std::size_t kMessageFixedHeaderBytes = 25 + 4 + 4 + 4;

MessageLayout message_layout(const Message& msg);

// Builds the complete message for an index sequence, including its table.
Message make_message(const MessageHeader& header, const Mask& mask, const IndexMap& idx);

std::vector<std::uint8_t> SerializeMessage(const Message& msg);
// Validates structure: lengths, table sum, mask population equal to N,
// zero-symbol conventions. Throws ErrorCode::kParse.
Message ParseMessage(std::span<const std::uint8_t> bytes);

// rANS-decodes the symbols. Throws ErrorCode::kDecode on a corrupt stream.
IndexMap decode_symbols(const Message& msg);

}  // namespace dsc

#endif  // DSC_MESSAGE_H_
