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

// Conditional feature codec.
//
// Sender: project each unpruned cell's channel vector to D dimensions,
// snap it to the nearest codeword, and entropy-code the indices together with
// the mask. The sender never sees anything from the receiver.
//
// Receiver: decode indices, look up codewords, and reconstruct every channel
// with a linear decoder whose input is the codeword concatenated with a
// context vector computed from the receiver's own feature map (the side
// information) and a constant term. An unconditional decoder that drops the
// context is fitted on the same data for comparison.

#ifndef DSC_CODEC_H_
#define DSC_CODEC_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsc/feature_map.h"
#include "dsc/message.h"
#include "dsc/vq.h"

namespace dsc {

struct Projection {
  Eigen::MatrixXd matrix;  // D x C, orthonormal rows or zero rows
  Eigen::VectorXd mean;    // C
};

// PCA over the nonzero channel vectors of all cells in `features`. Each
// principal direction is signed so its largest-magnitude entry is positive;
// directions beyond the data rank (or beyond C) are zero rows.
Projection fit_encoder_projection(std::span<const FeatureMap> features, int embed_dim);

struct CodecParams {
  int channels = 0;
  int embed_dim = 0;
  Projection encoder;
  // Side-information encoder: box mean of radius context_radius, then this
  // projection.
  Projection side_info;
  int context_radius = 1;
  std::uint64_t codebook_hash = 0;
  // Row c maps [codeword (D) | context (D) | 1] to output channel c.
  Eigen::MatrixXd conditional_decoder;
  // Row c maps [codeword (D) | 1] to output channel c.
  Eigen::MatrixXd unconditional_decoder;
  double lambda_ridge = 1e-3;
  double lambda_rec = 1.0;
  double beta = 0.25;

  int conditional_inputs() const { return 2 * embed_dim + 1; }
  int unconditional_inputs() const { return embed_dim + 1; }
  // Throws ErrorCode::kInvalidArgument / kNonFinite on inconsistent fields.
  void Validate() const;
};

// Params with both encoders set to `projection`, decoders zeroed.
CodecParams make_codec_params(const Projection& projection, const Codebook& cb,
                              int context_radius = 1);

// Latent vectors of the cells selected by `mask`, row-major cell order.
LatentMatrix project_cells(const FeatureMap& f, const Mask& mask, const Projection& projection);

// One D-vector per cell (H*W rows, row-major).
struct ContextMap {
  int height = 0;
  int width = 0;
  LatentMatrix values;
};
ContextMap si_context(const FeatureMap& local, const CodecParams& params);

struct TrainingPair {
  FeatureMap sender_pruned;
  Mask mask;
  FeatureMap receiver;
};

struct DecoderFit {
  Eigen::MatrixXd conditional;
  Eigen::MatrixXd unconditional;
  // Ridge objectives ||Y - X W||^2 + lambda_ridge * ||W without bias||^2,
  // summed over training cells and channels.
  double conditional_objective = 0.0;
  double unconditional_objective = 0.0;
  std::size_t cells = 0;
};

// Closed-form ridge fit of both decoders over the unpruned cells of all pairs.
DecoderFit fit_conditional_decoder(std::span<const TrainingPair> pairs, const CodecParams& params,
                                   const Codebook& cb, double lambda_ridge);

Message encode_message(const FeatureMap& pruned, const Mask& mask, const CodecParams& params,
                       const Codebook& cb);

FeatureMap decode_message(const Message& msg, const FeatureMap& local, const CodecParams& params,
                          const Codebook& cb);
FeatureMap decode_message(std::span<const std::uint8_t> bytes, const FeatureMap& local,
                          const CodecParams& params, const Codebook& cb);
FeatureMap decode_unconditional(const Message& msg, const CodecParams& params, const Codebook& cb);
FeatureMap decode_unconditional(std::span<const std::uint8_t> bytes, const CodecParams& params,
                                const Codebook& cb);

// DSCP file: versioned little-endian container of every CodecParams field.
std::vector<std::uint8_t> SerializeCodecParams(const CodecParams& params);
CodecParams ParseCodecParams(std::span<const std::uint8_t> bytes);
void WriteCodecParams(const std::string& path, const CodecParams& params);
CodecParams ReadCodecParams(const std::string& path);

}  // namespace dsc

#endif  // DSC_CODEC_H_
