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

#include "dsc/message.h"

#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "dsc/error.h"
#include "dsc/rng.h"
#include "test_util.h"

namespace dsc {
namespace {

using testing::Categorical;
using testing::ZipfWeights;

MessageHeader Header(int c, int h, int w, int d, int k) {
  MessageHeader hd;
  hd.channels = static_cast<std::uint16_t>(c);
  hd.height = static_cast<std::uint16_t>(h);
  hd.width = static_cast<std::uint16_t>(w);
  hd.embed_dim = static_cast<std::uint16_t>(d);
  hd.codebook_size = static_cast<std::uint16_t>(k);
  hd.codebook_hash = 0x0123456789abcdefULL;
  return hd;
}

Message RandomMessage(Rng& rng) {
  const int h = 1 + static_cast<int>(rng.Index(20));
  const int w = 1 + static_cast<int>(rng.Index(20));
  const int k = 1 + static_cast<int>(rng.Index(100));
  const double keep = rng.Uniform();
  Mask m(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) m.set(i, j, rng.Uniform() < keep);
  const Categorical dist(ZipfWeights(k, 1.0));
  IndexMap idx(m.count());
  for (auto& s : idx) s = dist.Draw(rng);
  return make_message(Header(4, h, w, 3, k), m, idx);
}

void ExpectParseError(std::span<const std::uint8_t> bytes) {
  try {
    ParseMessage(bytes);
    ADD_FAILURE() << "parsed";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse) << e.what();
  }
}

TEST(MessageTest, GoldenLayout) {
  Mask m(1, 3);
  m.set(0, 0, true);
  m.set(0, 2, true);
  const Message msg = make_message(Header(2, 1, 3, 1, 2), m, {0, 0});
  const std::vector<std::uint8_t> bytes = SerializeMessage(msg);
  const std::vector<std::uint8_t> head = {'D', 'S', 'C', '1', 1, 0, 2, 0, 1, 0, 3, 0, 1, 0, 2, 0, 12,
                                          0xef, 0xcd, 0xab, 0x89, 0x67, 0x45, 0x23, 0x01,
                                          1, 0, 0, 0, 0x05, 2, 0, 0, 0, 0x00, 0x10, 0x00, 0x00};
  ASSERT_GE(bytes.size(), head.size());
  EXPECT_EQ(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<long>(head.size())), head);
  const MessageLayout layout = message_layout(msg);
  EXPECT_EQ(layout.header, 37u);
  EXPECT_EQ(layout.mask, 1u);
  EXPECT_EQ(layout.table, 4u);
  EXPECT_EQ(layout.total(), bytes.size());
  EXPECT_EQ(bytes.size(), 41u + 1 + 4 + msg.payload.size());
}

TEST(MessageTest, RoundtripAndTotalRateAccounting) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const Message msg = RandomMessage(rng);
    const std::vector<std::uint8_t> bytes = SerializeMessage(msg);
    EXPECT_EQ(message_layout(msg).total(), bytes.size());
    const Message back = ParseMessage(bytes);
    EXPECT_EQ(back, msg);
    EXPECT_EQ(SerializeMessage(back), bytes);
    const IndexMap symbols = decode_symbols(back);
    EXPECT_EQ(symbols.size(), msg.mask.count());
  }
}

TEST(MessageTest, SymbolsRoundtrip) {
  Rng rng(2);
  Mask m(8, 8, true);
  IndexMap idx(64);
  for (auto& s : idx) s = static_cast<std::uint16_t>(rng.Index(10));
  const Message msg = make_message(Header(1, 8, 8, 2, 10), m, idx);
  EXPECT_EQ(decode_symbols(ParseMessage(SerializeMessage(msg))), idx);
}

TEST(MessageTest, ZeroSymbolMessage) {
  const Message msg = make_message(Header(3, 5, 5, 2, 8), Mask(5, 5, false), {});
  EXPECT_EQ(msg.symbol_count, 0u);
  EXPECT_TRUE(msg.payload.empty());
  const std::vector<std::uint8_t> bytes = SerializeMessage(msg);
  EXPECT_EQ(bytes.size(), 41u + 4 + 16);
  const Message back = ParseMessage(bytes);
  EXPECT_EQ(back, msg);
  EXPECT_TRUE(decode_symbols(back).empty());
}

TEST(MessageTest, Deterministic) {
  Rng a(3), b(3);
  EXPECT_EQ(SerializeMessage(RandomMessage(a)), SerializeMessage(RandomMessage(b)));
}

TEST(MessageTest, MakeMessageRejectsInconsistentInputs) {
  EXPECT_THROW(make_message(Header(1, 2, 2, 1, 4), Mask(2, 2, true), {0, 1}), Error);
  EXPECT_THROW(make_message(Header(1, 2, 2, 1, 4), Mask(2, 3, true), {0, 1, 2, 3, 0, 1}), Error);
  EXPECT_THROW(make_message(Header(1, 2, 2, 1, 4), Mask(2, 2, true), {0, 1, 2, 4}), Error);
  MessageHeader wide = Header(1, 1, 1, 1, 1);
  wide.precision = 16;
  // A single live symbol would need frequency 2^16, which the u16 field cannot hold.
  EXPECT_THROW(make_message(wide, Mask(1, 1, true), {0}), Error);
}

TEST(MessageTest, MalformedBytesAreParseErrors) {
  Rng rng(4);
  const Message msg = RandomMessage(rng);
  const std::vector<std::uint8_t> bytes = SerializeMessage(msg);
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    ExpectParseError(std::span<const std::uint8_t>(bytes.data(), n));
  }
  std::vector<std::uint8_t> extra = bytes;
  extra.push_back(0);
  ExpectParseError(extra);
  std::vector<std::uint8_t> magic = bytes;
  magic[3] = '2';
  ExpectParseError(magic);
  std::vector<std::uint8_t> version = bytes;
  version[4] = 2;
  ExpectParseError(version);
  std::vector<std::uint8_t> flags = bytes;
  flags[5] = 1;
  ExpectParseError(flags);
  std::vector<std::uint8_t> precision = bytes;
  precision[16] = 17;
  ExpectParseError(precision);
}

TEST(MessageTest, InconsistentBodyIsParseError) {
  Mask m(2, 2);
  m.set(0, 0, true);
  m.set(1, 1, true);
  const Message msg = make_message(Header(1, 2, 2, 1, 2), m, {0, 1});
  std::vector<std::uint8_t> bytes = SerializeMessage(msg);
  // Mask byte sits right after the 29 fixed bytes and its length word.
  std::vector<std::uint8_t> pop = bytes;
  pop[29] = 0x01;
  ExpectParseError(pop);
  std::vector<std::uint8_t> pad = bytes;
  pad[29] |= 0x10;
  ExpectParseError(pad);
  std::vector<std::uint8_t> table = bytes;
  table[34] ^= 0x01;
  ExpectParseError(table);
}

TEST(MessageTest, FuzzNeverCrashes) {
  Rng rng(5);
  const std::vector<std::uint8_t> base = SerializeMessage(RandomMessage(rng));
  int parsed = 0;
  for (int i = 0; i < 3000; ++i) {
    std::vector<std::uint8_t> bytes = base;
    const int flips = 1 + static_cast<int>(rng.Index(4));
    for (int f = 0; f < flips; ++f) bytes[rng.Index(bytes.size())] ^= static_cast<std::uint8_t>(1 + rng.Index(255));
    try {
      const Message m = ParseMessage(bytes);
      ++parsed;
      try {
        decode_symbols(m);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kDecode);
      }
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
    }
  }
  SUCCEED() << parsed << " mutated inputs parsed";
}

}  // namespace
}  // namespace dsc
