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

#include <bit>
#include <cmath>
#include <limits>

#include "dsc/byte_io.h"
#include "dsc/error.h"
#include "dsc/rng.h"

namespace dsc {

namespace {

std::uint64_t Fnv1a(std::uint64_t h, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t HashCodewords(const LatentMatrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = Fnv1a(h, static_cast<std::uint64_t>(m.rows()), 2);
  h = Fnv1a(h, static_cast<std::uint64_t>(m.cols()), 2);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    h = Fnv1a(h, std::bit_cast<std::uint32_t>(static_cast<float>(m.data()[i])), 4);
  }
  return h;
}

double SquaredDistance(const double* a, const double* b, int dim) {
  double d = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

void CheckDim(Eigen::Index got, int want) {
  if (got != want) {
    throw Error(ErrorCode::kShapeMismatch, "latent dimension " + std::to_string(got) +
                                               " vs codebook dimension " + std::to_string(want));
  }
}

}  // namespace

Codebook::Codebook(const LatentMatrix& codewords) : codewords_(codewords) {
  if (codewords_.rows() < 1 || codewords_.cols() < 1 || codewords_.rows() > 0xFFFF ||
      codewords_.cols() > 0xFFFF) {
    throw Error(ErrorCode::kInvalidArgument, "codebook must be K x D with 1 <= K, D <= 65535");
  }
  for (Eigen::Index i = 0; i < codewords_.size(); ++i) {
    double& v = codewords_.data()[i];
    if (!std::isfinite(v) || std::abs(v) > std::numeric_limits<float>::max()) {
      throw Error(ErrorCode::kNonFinite, "codeword entry");
    }
    v = static_cast<double>(static_cast<float>(v));
  }
  hash_ = HashCodewords(codewords_);
}

Assignment nearest_codeword(std::span<const double> v, const Codebook& cb) {
  CheckDim(static_cast<Eigen::Index>(v.size()), cb.dim());
  Assignment best{0, std::numeric_limits<double>::infinity()};
  const double* base = cb.codewords().data();
  for (int k = 0; k < cb.size(); ++k) {
    const double d = SquaredDistance(v.data(), base + static_cast<std::size_t>(k) * cb.dim(), cb.dim());
    if (d < best.squared_distance) best = {k, d};
  }
  return best;
}

IndexMap quantize_map(const LatentMatrix& latent, const Codebook& cb) {
  if (latent.rows() == 0) return {};
  CheckDim(latent.cols(), cb.dim());
  IndexMap out(static_cast<std::size_t>(latent.rows()));
  for (Eigen::Index i = 0; i < latent.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(
        nearest_codeword({latent.row(i).data(), static_cast<std::size_t>(cb.dim())}, cb).index);
  }
  return out;
}

LatentMatrix dequantize(const IndexMap& idx, const Codebook& cb) {
  LatentMatrix out(static_cast<Eigen::Index>(idx.size()), cb.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= cb.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "index " + std::to_string(idx[i]) +
                                                   " with K = " + std::to_string(cb.size()));
    }
    out.row(static_cast<Eigen::Index>(i)) = cb.codewords().row(idx[i]);
  }
  return out;
}

namespace {

struct Labels {
  std::vector<int> index;
  std::vector<double> dist;
  double distortion = 0.0;
};

Labels Assign(const LatentMatrix& samples, const LatentMatrix& centroids) {
  const auto n = static_cast<std::size_t>(samples.rows());
  const int dim = static_cast<int>(samples.cols());
  Labels labels{std::vector<int>(n), std::vector<double>(n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = samples.row(static_cast<Eigen::Index>(i)).data();
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
      const double d = SquaredDistance(x, centroids.row(k).data(), dim);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    labels.index[i] = best;
    labels.dist[i] = best_d;
    labels.distortion += best_d;
  }
  labels.distortion /= static_cast<double>(n);
  return labels;
}

LatentMatrix KMeansPlusPlus(const LatentMatrix& samples, int k, Rng& rng) {
  const auto n = static_cast<std::size_t>(samples.rows());
  const int dim = static_cast<int>(samples.cols());
  LatentMatrix centroids(k, samples.cols());
  centroids.row(0) = samples.row(static_cast<Eigen::Index>(rng.Index(n)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = SquaredDistance(samples.row(static_cast<Eigen::Index>(i)).data(), centroids.row(0).data(), dim);
  }
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.Uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      pick = rng.Index(n);
    }
    centroids.row(c) = samples.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(samples.row(static_cast<Eigen::Index>(i)).data(),
                                              centroids.row(c).data(), dim));
    }
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const LatentMatrix& samples, int k, int iters, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (samples.rows() < k) {
    throw Error(ErrorCode::kInvalidArgument, std::to_string(samples.rows()) +
                                                 " samples cannot train " + std::to_string(k) +
                                                 " codewords");
  }
  if (iters < 0) throw Error(ErrorCode::kInvalidArgument, "iters must be >= 0");
  Rng rng(seed);
  LatentMatrix centroids = KMeansPlusPlus(samples, k, rng);
  Labels labels = Assign(samples, centroids);
  std::vector<double> history{labels.distortion};
  int iteration = 0;
  while (iteration < iters) {
    ++iteration;
    LatentMatrix sums = LatentMatrix::Zero(k, samples.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.index.size(); ++i) {
      sums.row(labels.index[i]) += samples.row(static_cast<Eigen::Index>(i));
      ++counts[static_cast<std::size_t>(labels.index[i])];
    }
    std::vector<double> far = labels.dist;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      std::size_t farthest = 0;
      for (std::size_t i = 1; i < far.size(); ++i) {
        if (far[i] > far[farthest]) farthest = i;
      }
      centroids.row(c) = samples.row(static_cast<Eigen::Index>(farthest));
      far[farthest] = 0.0;
    }
    Labels next = Assign(samples, centroids);
    history.push_back(next.distortion);
    const bool converged = next.index == labels.index;
    labels = std::move(next);
    if (converged) break;
  }
  return {Codebook(centroids), std::move(history), iteration};
}

Codebook train_codebook(const LatentMatrix& samples, int k, int iters, std::uint64_t seed) {
  return kmeans(samples, k, iters, seed).codebook;
}

VqLosses vq_losses(const LatentMatrix& latent, const Codebook& cb, double beta) {
  if (!(beta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  if (latent.rows() == 0) return {};
  CheckDim(latent.cols(), cb.dim());
  double gap = 0.0;
  for (Eigen::Index i = 0; i < latent.rows(); ++i) {
    gap += nearest_codeword({latent.row(i).data(), static_cast<std::size_t>(cb.dim())}, cb)
               .squared_distance;
  }
  gap /= static_cast<double>(latent.rows());
  // The two terms share a value and differ only in which side receives the
  // gradient during fine-tuning.
  return {gap, beta * gap};
}

CodebookEma::CodebookEma(const Codebook& cb, double decay)
    : decay_(decay),
      cluster_size_(Eigen::VectorXd::Ones(cb.size())),
      embed_sum_(cb.codewords()) {
  if (!(decay >= 0.0 && decay < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "EMA decay must lie in [0, 1)");
  }
}

Codebook CodebookEma::Update(const LatentMatrix& latent, const IndexMap& idx) {
  if (static_cast<std::size_t>(latent.rows()) != idx.size()) {
    throw Error(ErrorCode::kShapeMismatch, "latent rows vs index count");
  }
  CheckDim(latent.cols(), static_cast<int>(embed_sum_.cols()));
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(cluster_size_.size());
  LatentMatrix sums = LatentMatrix::Zero(embed_sum_.rows(), embed_sum_.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= cluster_size_.size()) throw Error(ErrorCode::kIndexOutOfRange, "EMA index");
    counts(idx[i]) += 1.0;
    sums.row(idx[i]) += latent.row(static_cast<Eigen::Index>(i));
  }
  cluster_size_ = decay_ * cluster_size_ + (1.0 - decay_) * counts;
  embed_sum_ = decay_ * embed_sum_ + (1.0 - decay_) * sums;
  LatentMatrix codewords = embed_sum_;
  for (Eigen::Index k = 0; k < codewords.rows(); ++k) codewords.row(k) /= cluster_size_(k);
  return Codebook(codewords);
}

std::vector<std::uint8_t> SerializeCodebook(const Codebook& cb) {
  ByteWriter w;
  w.Tag("CDBK");
  w.U16(static_cast<std::uint16_t>(cb.size()));
  w.U16(static_cast<std::uint16_t>(cb.dim()));
  w.U64(cb.version_hash());
  const LatentMatrix& m = cb.codewords();
  for (Eigen::Index i = 0; i < m.size(); ++i) w.F32(static_cast<float>(m.data()[i]));
  return w.Take();
}

Codebook ParseCodebook(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectTag("CDBK");
  const int k = r.U16();
  const int d = r.U16();
  const std::uint64_t hash = r.U64();
  if (k == 0 || d == 0) throw Error(ErrorCode::kParse, "CDBK with zero dimension");
  if (r.remaining() != static_cast<std::size_t>(k) * d * 4) {
    throw Error(ErrorCode::kParse, "CDBK payload length");
  }
  LatentMatrix m(k, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.F32();
  Codebook cb(m);
  if (cb.version_hash() != hash) {
    throw Error(ErrorCode::kCodebookMismatch, "CDBK stored hash does not match its contents");
  }
  return cb;
}

void WriteCodebook(const std::string& path, const Codebook& cb) {
  WriteFileBytes(path, SerializeCodebook(cb));
}

Codebook ReadCodebook(const std::string& path) { return ParseCodebook(ReadFileBytes(path)); }

}  // namespace dsc
