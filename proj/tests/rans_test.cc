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

#include "dsc/rans.h"

#include <cstdint>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dsc/error.h"
#include "dsc/rng.h"
#include "test_util.h"

namespace dsc {
namespace {

using testing::Categorical;
using testing::EntropyOracle;
using testing::RandomRansCase;
using testing::Sample;
using testing::ZipfWeights;

IndexMap Repeat(std::initializer_list<std::pair<std::uint16_t, int>> runs) {
  IndexMap out;
  for (auto [s, n] : runs) out.insert(out.end(), static_cast<std::size_t>(n), s);
  return out;
}

void ExpectTableInvariants(const FrequencyTable& ft, const IndexMap& idx) {
  std::uint64_t sum = 0;
  for (int s = 0; s < ft.size(); ++s) {
    EXPECT_EQ(ft.cum(s + 1), ft.cum(s) + ft.freq(s));
    sum += ft.freq(s);
  }
  EXPECT_EQ(sum, ft.total());
  for (auto s : idx) EXPECT_GE(ft.freq(s), 1u);
}

TEST(FrequencyTableTest, Examples) {
  const FrequencyTable uniform = build_freq_table(Repeat({{0, 5}, {1, 5}, {2, 5}, {3, 5}}), 4, 12);
  for (int s = 0; s < 4; ++s) EXPECT_EQ(uniform.freq(s), 1024u);

  const FrequencyTable three_one = build_freq_table(Repeat({{0, 3}, {1, 1}}), 2, 12);
  EXPECT_EQ(three_one.freq(0), 3072u);
  EXPECT_EQ(three_one.freq(1), 1024u);

  const IndexMap skew = Repeat({{0, 4095}, {1, 1}});
  const FrequencyTable floor = build_freq_table(skew, 2, 12);
  EXPECT_GE(floor.freq(1), 1u);
  ExpectTableInvariants(floor, skew);

  const IndexMap tiny = Repeat({{0, 100000}, {1, 1}, {2, 1}});
  const FrequencyTable floored = build_freq_table(tiny, 5, 8);
  ExpectTableInvariants(floored, tiny);
  EXPECT_EQ(floored.freq(3), 0u);
}

TEST(FrequencyTableTest, Errors) {
  EXPECT_THROW(build_freq_table({}, 4, 12), Error);
  EXPECT_THROW(build_freq_table({4}, 4, 12), Error);
  EXPECT_THROW(FrequencyTable({1, 2}, 2), Error);
  EXPECT_THROW(FrequencyTable({}, 2), Error);
  IndexMap many(300);
  std::iota(many.begin(), many.end(), 0);
  EXPECT_THROW(build_freq_table(many, 300, 8), Error);
}

TEST(FrequencyTableTest, RandomInvariants) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const auto c = RandomRansCase(rng);
    ExpectTableInvariants(c.table, c.idx);
  }
}

TEST(RansTest, BoundaryLengths) {
  Rng rng(2);
  const int k = 64;
  const Categorical dist(ZipfWeights(k, 1.1));
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{64}, std::size_t{100000}}) {
    const IndexMap idx = Sample(dist, n, rng);
    const FrequencyTable ft = build_freq_table(idx, k);
    const RansStream st = rans_encode(idx, ft);
    EXPECT_EQ(rans_decode(st.payload, ft, n, st.final_state), idx) << n;
  }
}

TEST(RansTest, SingleSymbolAlphabet) {
  const IndexMap idx(1000, 0);
  const FrequencyTable ft = build_freq_table(idx, 1);
  const RansStream st = rans_encode(idx, ft);
  EXPECT_TRUE(st.payload.empty());
  EXPECT_EQ(rans_decode(st.payload, ft, idx.size(), st.final_state), idx);
}

TEST(RansTest, RandomRoundtrips) {
  Rng rng(3);
  for (int i = 0; i < 20000; ++i) {
    const auto c = RandomRansCase(rng);
    const RansStream st = rans_encode(c.idx, c.table);
    ASSERT_EQ(rans_decode(st.payload, c.table, c.idx.size(), st.final_state), c.idx) << i;
  }
}

TEST(RansTest, EmptySequence) {
  const FrequencyTable ft({4096}, 12);
  const RansStream st = rans_encode({}, ft);
  EXPECT_TRUE(st.payload.empty());
  EXPECT_EQ(st.final_state, kRansLowerBound);
  EXPECT_TRUE(rans_decode(st.payload, ft, 0, st.final_state).empty());
}

TEST(RansTest, NearEntropyOnLargeInputs) {
  Rng rng(4);
  const std::size_t n = 100000;
  const std::vector<std::vector<double>> sources = {
      std::vector<double>(64, 1.0), ZipfWeights(64, 1.1), {0.75, 0.25}};
  for (const auto& w : sources) {
    const int k = static_cast<int>(w.size());
    const IndexMap idx = Sample(Categorical(w), n, rng);
    const RansStream st = rans_encode(idx, build_freq_table(idx, k));
    const double h = EntropyOracle(idx, k);
    const double bits = 8.0 * static_cast<double>(st.payload.size()) + 32.0;
    EXPECT_LE(bits, 1.02 * static_cast<double>(n) * h + 512.0) << "K=" << k;
    EXPECT_LE(static_cast<double>(st.payload.size()), n * h / 8.0 * 1.02 + 64.0);
  }
}

TEST(RansTest, ZeroFrequencySymbolRejected) {
  const FrequencyTable ft({4096, 0}, 12);
  EXPECT_THROW(rans_encode({0, 1}, ft), Error);
  EXPECT_THROW(rans_encode({2}, ft), Error);
}

TEST(RansTest, CorruptionIsExplicit) {
  Rng rng(5);
  const Categorical dist(ZipfWeights(16, 1.0));
  const IndexMap idx = Sample(dist, 5000, rng);
  const FrequencyTable ft = build_freq_table(idx, 16);
  const RansStream st = rans_encode(idx, ft);
  ASSERT_GT(st.payload.size(), 10u);

  auto expect_decode_error = [&](std::span<const std::uint8_t> payload, std::size_t n, std::uint32_t x) {
    try {
      rans_decode(payload, ft, n, x);
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecode);
    }
  };
  const std::vector<std::uint8_t> truncated(st.payload.begin(), st.payload.end() - 1);
  expect_decode_error(truncated, idx.size(), st.final_state);
  std::vector<std::uint8_t> longer = st.payload;
  longer.push_back(0);
  expect_decode_error(longer, idx.size(), st.final_state);
  expect_decode_error(st.payload, idx.size(), 5);
  expect_decode_error(st.payload, idx.size() - 1, st.final_state);

  // Any single-byte flip is either detected or yields different symbols; it
  // never silently reproduces the original.
  int detected = 0;
  for (std::size_t pos = 0; pos < st.payload.size(); pos += 7) {
    std::vector<std::uint8_t> flipped = st.payload;
    flipped[pos] ^= 0x5a;
    try {
      EXPECT_NE(rans_decode(flipped, ft, idx.size(), st.final_state), idx);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecode);
      ++detected;
    }
  }
  EXPECT_GT(detected, 0);
}

TEST(RansTest, WrongTableOfSameSize) {
  Rng rng(6);
  const IndexMap idx = Sample(Categorical(ZipfWeights(8, 1.2)), 3000, rng);
  const FrequencyTable ft = build_freq_table(idx, 8);
  const FrequencyTable other = build_freq_table(Sample(Categorical(std::vector<double>(8, 1.0)), 3000, rng), 8);
  ASSERT_NE(ft, other);
  const RansStream st = rans_encode(idx, ft);
  try {
    EXPECT_NE(rans_decode(st.payload, other, idx.size(), st.final_state), idx);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDecode);
  }
}

TEST(RansTest, Deterministic) {
  Rng rng(7);
  const auto c = RandomRansCase(rng, 5000);
  const RansStream a = rans_encode(c.idx, c.table);
  const RansStream b = rans_encode(c.idx, c.table);
  EXPECT_EQ(a.payload, b.payload);
  EXPECT_EQ(a.final_state, b.final_state);
}

}  // namespace
}  // namespace dsc
