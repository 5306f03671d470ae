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

// Gradient fine-tuning of the encoder projection and conditional decoder.
//
// Loss = lambda_rec * MSE(reconstruction, sender) + codebook_loss + commitment_loss.
// The quantizer is bypassed in the backward pass (straight-through): the
// gradient reaching the dequantized latent is handed to the encoder output
// unchanged. Codewords are refreshed by an exponential moving average of the
// latents assigned to them rather than by gradient.

#ifndef DSC_FINETUNE_H_
#define DSC_FINETUNE_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dsc/codec.h"
#include "dsc/vq.h"

namespace dsc {

struct FinetuneLoss {
  double total = 0.0;
  double recon_mse = 0.0;
  double codebook_loss = 0.0;
  double commitment_loss = 0.0;
};

// Quantizer state captured once and reused: per pair, the codeword indices
// and the residual (codeword - latent) at capture time. Under a frozen
// quantizer the forward pass uses latent + captured residual, which makes the
// straight-through gradient the exact gradient of the reported loss.
class FrozenAssignments {
 public:
  static FrozenAssignments Capture(const CodecParams& params, const Codebook& cb,
                                   std::span<const TrainingPair> batch);

  struct Entry {
    IndexMap indices;
    LatentMatrix residual;
  };
  const std::vector<Entry>& entries() const { return entries_; }
  std::uint64_t codebook_hash() const { return codebook_hash_; }
  double codebook_loss() const { return codebook_loss_; }

 private:
  std::vector<Entry> entries_;
  std::uint64_t codebook_hash_ = 0;
  double codebook_loss_ = 0.0;
};

struct FinetuneGradient {
  FinetuneLoss loss;
  Eigen::MatrixXd decoder;     // same shape as conditional_decoder
  Eigen::MatrixXd projection;  // same shape as encoder.matrix
  // Latents and assignments of the forward pass, in batch order.
  LatentMatrix latent;
  IndexMap indices;
};

FinetuneGradient finetune_gradient(const CodecParams& params, const Codebook& cb,
                                   std::span<const TrainingPair> batch,
                                   const FrozenAssignments* frozen = nullptr);

// Stateful trainer; owns the parameters it updates, so concurrent inference
// must use a copy of params()/codebook().
class Finetuner {
 public:
  Finetuner(CodecParams params, Codebook cb, double ema_decay = 0.99);

  // One gradient step of size lr (lr == 0 leaves everything untouched).
  // Returns the loss evaluated before the step. A non-finite loss throws
  // ErrorCode::kNonFinite and leaves the state unchanged. With `frozen`, the
  // codebook is not updated.
  FinetuneLoss Step(std::span<const TrainingPair> batch, double lr,
                    const FrozenAssignments* frozen = nullptr);

  const CodecParams& params() const { return params_; }
  const Codebook& codebook() const { return codebook_; }

 private:
  CodecParams params_;
  Codebook codebook_;
  CodebookEma ema_;
};

struct FinetuneStepResult {
  CodecParams params;
  Codebook codebook;
  FinetuneLoss loss;
};

// Single step from fresh EMA statistics.
FinetuneStepResult finetune_step(const CodecParams& params, const Codebook& cb,
                                 std::span<const TrainingPair> batch, double lr);

}  // namespace dsc

#endif  // DSC_FINETUNE_H_
