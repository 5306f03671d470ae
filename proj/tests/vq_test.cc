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

#include "dsc/vq.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "dsc/error.h"
#include "dsc/rng.h"

namespace dsc {
namespace {

LatentMatrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  LatentMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

LatentMatrix RandomLatent(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  LatentMatrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Normal();
  return m;
}

std::span<const double> Row(const LatentMatrix& m, Eigen::Index i) {
  return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

TEST(CodebookTest, ValidationAndHash) {
  EXPECT_THROW(Codebook(LatentMatrix(0, 2)), Error);
  EXPECT_THROW(Codebook(LatentMatrix(2, 0)), Error);
  LatentMatrix bad = RandomLatent(2, 2, 1);
  bad(1, 1) = NAN;
  EXPECT_THROW(Codebook{bad}, Error);

  const LatentMatrix m = RandomLatent(8, 3, 2);
  EXPECT_EQ(Codebook(m).version_hash(), Codebook(m).version_hash());
  LatentMatrix other = m;
  other(7, 2) += 0.5;
  EXPECT_NE(Codebook(m).version_hash(), Codebook(other).version_hash());
  // Same entries, different shape.
  LatentMatrix reshaped = Eigen::Map<const LatentMatrix>(m.data(), 4, 6);
  EXPECT_NE(Codebook(m).version_hash(), Codebook(reshaped).version_hash());
}

TEST(NearestCodewordTest, Examples) {
  const Codebook cb(RandomLatent(10, 4, 3));
  const Assignment exact = nearest_codeword(cb.codeword(7), cb);
  EXPECT_EQ(exact.index, 7);
  EXPECT_EQ(exact.squared_distance, 0.0);

  const Codebook tie(Rows({{5, 5}, {5, 5}, {1, 0}, {9, 9}, {9, 9}, {-1, 0}}));
  EXPECT_EQ(nearest_codeword(std::vector<double>{0.0, 0.0}, tie).index, 2);

  const Codebook two(Rows({{0, 0}, {1, 0}}));
  const Assignment a = nearest_codeword(std::vector<double>{0.9, 0.0}, two);
  EXPECT_EQ(a.index, 1);
  EXPECT_NEAR(a.squared_distance, 0.01, 1e-12);
  EXPECT_THROW(nearest_codeword(std::vector<double>{0.0, 0.0, 0.0}, two), Error);
}

TEST(NearestCodewordTest, ArgminIsOptimal) {
  const Codebook cb(RandomLatent(32, 5, 4));
  const LatentMatrix x = RandomLatent(500, 5, 5);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Assignment a = nearest_codeword(Row(x, i), cb);
    for (int k = 0; k < cb.size(); ++k) {
      const double d = (x.row(i) - cb.codewords().row(k)).squaredNorm();
      EXPECT_LE(a.squared_distance, d + 1e-12);
      if (k < a.index) EXPECT_LT(a.squared_distance, d);
    }
  }
}

TEST(QuantizeMapTest, Examples) {
  const Codebook cb(RandomLatent(6, 3, 6));
  EXPECT_TRUE(quantize_map(LatentMatrix(0, 3), cb).empty());
  const IndexMap ids = quantize_map(cb.codewords(), cb);
  for (int k = 0; k < 6; ++k) EXPECT_EQ(ids[static_cast<std::size_t>(k)], k);
  const LatentMatrix x = RandomLatent(200, 3, 7);
  const IndexMap q = quantize_map(x, cb);
  EXPECT_EQ(quantize_map(dequantize(q, cb), cb), q);
  EXPECT_THROW(quantize_map(RandomLatent(3, 4, 1), cb), Error);
}

TEST(DequantizeTest, Examples) {
  const Codebook cb(Rows({{1, 2}, {3, 4}}));
  const LatentMatrix out = dequantize({0, 0, 1}, cb);
  EXPECT_EQ(out, Rows({{1, 2}, {1, 2}, {3, 4}}));
  EXPECT_EQ(dequantize({1}, cb), Rows({{3, 4}}));
  const IndexMap ids = {0, 1};
  EXPECT_EQ(dequantize(ids, cb), cb.codewords());
  try {
    dequantize({2}, cb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
}

// Minimum mean distortion over all assignments of n points into k nonempty
// or empty groups, by enumeration.
double BruteForceDistortion(const LatentMatrix& x, int k, std::vector<int>* best_labels) {
  const int n = static_cast<int>(x.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    LatentMatrix sums = LatentMatrix::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      d += (x.row(i) - sums.row(l) / counts[static_cast<std::size_t>(l)]).squaredNorm();
    }
    if (d / n < best) {
      best = d / n;
      *best_labels = labels;
    }
    int pos = 0;
    while (pos < n && ++labels[static_cast<std::size_t>(pos)] == k) labels[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
  }
  return best;
}

TEST(KMeansTest, TwoClusterExampleMatchesBruteForce) {
  const LatentMatrix x = Rows({{0, 0}, {0.1, 0}, {10, 0}, {9.9, 0}});
  std::vector<int> labels;
  const double oracle = BruteForceDistortion(x, 2, &labels);
  EXPECT_NEAR(oracle, 0.0025, 1e-12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KMeansResult r = kmeans(x, 2, 20, seed);
    std::vector<double> c = {r.codebook.codewords()(0, 0), r.codebook.codewords()(1, 0)};
    std::sort(c.begin(), c.end());
    EXPECT_NEAR(c[0], 0.05, 1e-6);
    EXPECT_NEAR(c[1], 9.95, 1e-6);
    EXPECT_NEAR(r.distortion_history.back(), oracle, 1e-9);
  }
}

TEST(KMeansTest, RandomSmallSetsReachBruteForceOnEasyData) {
  // Well-separated blobs: Lloyd from k-means++ finds the global optimum.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    LatentMatrix x(8, 2);
    for (int i = 0; i < 8; ++i) {
      x(i, 0) = (i < 4 ? 0.0 : 50.0) + 0.1 * rng.Normal();
      x(i, 1) = 0.1 * rng.Normal();
    }
    std::vector<int> labels;
    const double oracle = BruteForceDistortion(x, 2, &labels);
    EXPECT_NEAR(kmeans(x, 2, 50, seed).distortion_history.back(), oracle, 1e-9);
  }
}

TEST(KMeansTest, EachSampleItsOwnCentroid) {
  // Values exactly representable as f32 so the stored codebook equals samples.
  LatentMatrix x = RandomLatent(5, 3, 8);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(x.data()[i]);
  const KMeansResult r = kmeans(x, 5, 10, 1);
  EXPECT_EQ(r.distortion_history.back(), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    bool found = false;
    for (int k = 0; k < 5; ++k) found |= r.codebook.codewords().row(k) == x.row(i);
    EXPECT_TRUE(found);
  }
}

TEST(KMeansTest, DistortionNonIncreasingAndBounded) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const LatentMatrix x = RandomLatent(400, 4, 100 + seed);
    const int iters = 15;
    const KMeansResult r = kmeans(x, 16, iters, seed);
    ASSERT_GE(r.distortion_history.size(), 2u);
    EXPECT_LE(r.iterations, iters);
    EXPECT_EQ(r.distortion_history.size(), static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t i = 1; i < r.distortion_history.size(); ++i) {
      EXPECT_LE(r.distortion_history[i], r.distortion_history[i - 1]);
    }
  }
}

TEST(KMeansTest, DuplicatesAndEmptyClusters) {
  // Many duplicates: only 3 distinct points for 3 codewords.
  LatentMatrix x(30, 1);
  for (int i = 0; i < 30; ++i) x(i, 0) = i % 3;
  const KMeansResult r = kmeans(x, 3, 10, 4);
  EXPECT_EQ(r.distortion_history.back(), 0.0);
  // All points identical: k-means still returns K finite codewords.
  const KMeansResult same = kmeans(LatentMatrix::Ones(10, 2), 4, 5, 1);
  EXPECT_EQ(same.codebook.size(), 4);
  EXPECT_EQ(same.distortion_history.back(), 0.0);
}

TEST(KMeansTest, DeterministicAndErrors) {
  const LatentMatrix x = RandomLatent(300, 3, 9);
  EXPECT_EQ(train_codebook(x, 8, 10, 5).codewords(), train_codebook(x, 8, 10, 5).codewords());
  EXPECT_THROW(train_codebook(x, 301, 10, 5), Error);
  EXPECT_THROW(train_codebook(x, 0, 10, 5), Error);
}

TEST(VqLossesTest, Examples) {
  const Codebook cb(Rows({{0, 0}, {4, 0}}));
  const VqLosses zero = vq_losses(cb.codewords(), cb, 0.25);
  EXPECT_EQ(zero.codebook_loss, 0.0);
  EXPECT_EQ(zero.commitment_loss, 0.0);
  const VqLosses one = vq_losses(Rows({{0, 1.5}}), cb, 0.25);
  EXPECT_DOUBLE_EQ(one.codebook_loss, 2.25);
  EXPECT_DOUBLE_EQ(one.commitment_loss, 0.25 * 2.25);
  const VqLosses b0 = vq_losses(RandomLatent(20, 2, 1), cb, 0.0);
  EXPECT_EQ(b0.commitment_loss, 0.0);
  EXPECT_GT(b0.codebook_loss, 0.0);
}

TEST(CodebookEmaTest, MovesTowardAssignedMeans) {
  const Codebook cb(Rows({{0, 0}, {10, 10}}));
  CodebookEma ema(cb, 0.5);
  const LatentMatrix z = Rows({{2, 0}, {2, 0}});
  const Codebook next = ema.Update(z, {0, 0});
  // cluster 0: size 0.5*1 + 0.5*2 = 1.5, sum 0.5*0 + 0.5*(4,0) = (2,0).
  EXPECT_NEAR(next.codewords()(0, 0), 2.0 / 1.5, 1e-6);
  EXPECT_NEAR(next.codewords()(0, 1), 0.0, 1e-12);
  // cluster 1 unused: size 0.5, sum (5,5) -> unchanged codeword.
  EXPECT_NEAR(next.codewords()(1, 0), 10.0, 1e-6);
  EXPECT_THROW(ema.Update(z, {0}), Error);
  EXPECT_THROW(ema.Update(z, {0, 2}), Error);
  EXPECT_THROW(CodebookEma(cb, 1.0), Error);
}

TEST(CodebookFileTest, RoundtripAndMismatch) {
  const Codebook cb(RandomLatent(12, 5, 10));
  const std::vector<std::uint8_t> bytes = SerializeCodebook(cb);
  EXPECT_EQ(bytes.size(), 4u + 2 + 2 + 8 + 12 * 5 * 4);
  const Codebook back = ParseCodebook(bytes);
  EXPECT_EQ(back.codewords(), cb.codewords());
  EXPECT_EQ(back.version_hash(), cb.version_hash());

  std::vector<std::uint8_t> tampered = bytes;
  tampered.back() ^= 0x01;
  try {
    ParseCodebook(tampered);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCodebookMismatch);
  }
  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 1);
  try {
    ParseCodebook(truncated);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
  const auto path = std::filesystem::temp_directory_path() / "dsc_vq_test.cdbk";
  WriteCodebook(path.string(), cb);
  EXPECT_EQ(ReadCodebook(path.string()).version_hash(), cb.version_hash());
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace dsc
