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

// Vector quantization: the discrete bottleneck between the sender's projected
// latent and the entropy coder.

#ifndef DSC_VQ_H_
#define DSC_VQ_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dsc {

// One latent vector per row.
using LatentMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
// Codeword indices in the order the latents were produced.
using IndexMap = std::vector<std::uint16_t>;

// K x D codewords. Entries are rounded to single precision on construction so
// the CDBK file round-trips exactly and version_hash() is well defined.
class Codebook {
 public:
  explicit Codebook(const LatentMatrix& codewords);

  int size() const { return static_cast<int>(codewords_.rows()); }
  int dim() const { return static_cast<int>(codewords_.cols()); }
  const LatentMatrix& codewords() const { return codewords_; }
  std::span<const double> codeword(int k) const {
    return {codewords_.row(k).data(), static_cast<std::size_t>(codewords_.cols())};
  }
  // FNV-1a over (K, D, f32 entries); identifies the codebook inside messages.
  std::uint64_t version_hash() const { return hash_; }

 private:
  LatentMatrix codewords_;
  std::uint64_t hash_ = 0;
};

struct Assignment {
  int index = 0;
  double squared_distance = 0.0;
};

// Squared-Euclidean argmin; ties go to the lowest index.
Assignment nearest_codeword(std::span<const double> v, const Codebook& cb);
IndexMap quantize_map(const LatentMatrix& latent, const Codebook& cb);
LatentMatrix dequantize(const IndexMap& idx, const Codebook& cb);

struct KMeansResult {
  Codebook codebook;
  // Mean squared distance after the initial assignment and after every Lloyd
  // iteration. Non-increasing.
  std::vector<double> distortion_history;
  int iterations = 0;
};

// k-means++ seeding followed by at most `iters` Lloyd iterations. Empty
// clusters are moved onto the sample farthest from its centroid.
KMeansResult kmeans(const LatentMatrix& samples, int k, int iters, std::uint64_t seed);
Codebook train_codebook(const LatentMatrix& samples, int k, int iters, std::uint64_t seed);

struct VqLosses {
  double codebook_loss = 0.0;    // mean ||sg[z] - e||^2
  double commitment_loss = 0.0;  // beta * mean ||z - sg[e]||^2
};
VqLosses vq_losses(const LatentMatrix& latent, const Codebook& cb, double beta);

// Exponential-moving-average codebook update used during fine-tuning.
class CodebookEma {
 public:
  explicit CodebookEma(const Codebook& cb, double decay = 0.99);

  // Folds one batch of assigned latents into the running statistics and
  // returns the refreshed codebook.
  Codebook Update(const LatentMatrix& latent, const IndexMap& idx);

  double decay() const { return decay_; }

 private:
  double decay_;
  Eigen::VectorXd cluster_size_;
  LatentMatrix embed_sum_;
};

// CDBK file: "CDBK", u16 K, u16 D, u64 version_hash, K*D little-endian f32.
std::vector<std::uint8_t> SerializeCodebook(const Codebook& cb);
Codebook ParseCodebook(std::span<const std::uint8_t> bytes);
void WriteCodebook(const std::string& path, const Codebook& cb);
Codebook ReadCodebook(const std::string& path);

}  // namespace dsc

#endif  // DSC_VQ_H_
