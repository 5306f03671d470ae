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

// Helpers shared by the codec and the fine-tuning loop. All sums run in a
// fixed order so results are reproducible bit-for-bit.

#ifndef DSC_CODEC_INTERNAL_H_
#define DSC_CODEC_INTERNAL_H_

#include <vector>

#include <Eigen/Dense>

#include "dsc/codec.h"

namespace dsc::internal {

// Indices of set cells, row-major.
std::vector<std::size_t> MaskedCells(const Mask& mask);

// Channel vector of `cell`, shifted by -mean and projected.
void ProjectCell(const FeatureMap& f, std::size_t cell, const Projection& projection, double* out);

// Mean over the (2r+1)^2 neighborhood with zero padding, C values per cell,
// laid out cell-major: out[cell * C + c].
std::vector<double> BoxMean(const FeatureMap& f, int radius);

// Design matrix rows [codeword | context | 1] and targets for the masked cells
// of one pair.
struct DesignRows {
  std::vector<std::size_t> cells;
  IndexMap indices;
  LatentMatrix latent;    // projected sender vectors, before quantization
  LatentMatrix inputs;    // cells x (2D + 1)
  LatentMatrix targets;   // cells x C
};
DesignRows BuildDesignRows(const TrainingPair& pair, const CodecParams& params, const Codebook& cb);

// weights(c, :) . x over the first n inputs, left-to-right.
inline double Dot(const Eigen::MatrixXd& weights, Eigen::Index row, const double* x, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) acc += weights(row, j) * x[j];
  return acc;
}

void CheckPair(const TrainingPair& pair, const CodecParams& params);

}  // namespace dsc::internal

#endif  // DSC_CODEC_INTERNAL_H_
