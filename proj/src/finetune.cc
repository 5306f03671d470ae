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


#include "dsc/finetune.h"

#include <cmath>
#include <string>

#include "codec_internal.h"
#include "dsc/error.h"

namespace dsc {

FrozenAssignments FrozenAssignments::Capture(const CodecParams& params, const Codebook& cb,
                                             std::span<const TrainingPair> batch) {
  FrozenAssignments frozen;
  frozen.codebook_hash_ = cb.version_hash();
  double gap = 0.0;
  std::size_t cells = 0;
  for (const TrainingPair& pair : batch) {
    internal::DesignRows rows = internal::BuildDesignRows(pair, params, cb);
    LatentMatrix residual = dequantize(rows.indices, cb) - rows.latent;
    gap += residual.squaredNorm();
    cells += rows.cells.size();
    frozen.entries_.push_back({std::move(rows.indices), std::move(residual)});
  }
  frozen.codebook_loss_ = cells > 0 ? gap / static_cast<double>(cells) : 0.0;
  return frozen;
}

FinetuneGradient finetune_gradient(const CodecParams& params, const Codebook& cb,
                                   std::span<const TrainingPair> batch,
                                   const FrozenAssignments* frozen) {
  params.Validate();
  if (params.codebook_hash != cb.version_hash()) {
    throw Error(ErrorCode::kCodebookMismatch, "codec params reference a different codebook");
  }
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty fine-tuning batch");
  if (frozen != nullptr) {
    if (frozen->entries().size() != batch.size()) {
      throw Error(ErrorCode::kShapeMismatch, "frozen assignments were captured on another batch");
    }
    if (frozen->codebook_hash() != cb.version_hash()) {
      throw Error(ErrorCode::kCodebookMismatch, "frozen assignments used another codebook");
    }
  }

  const int dim = params.embed_dim;
  const int channels = params.channels;
  const int inputs = params.conditional_inputs();
  std::vector<internal::DesignRows> rows;
  rows.reserve(batch.size());
  std::size_t total_cells = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    rows.push_back(internal::BuildDesignRows(batch[b], params, cb));
    total_cells += rows.back().cells.size();
    if (frozen != nullptr &&
        frozen->entries()[b].indices.size() != rows.back().cells.size()) {
      throw Error(ErrorCode::kShapeMismatch, "frozen assignments were captured on another batch");
    }
  }

  FinetuneGradient out;
  out.decoder = Eigen::MatrixXd::Zero(channels, inputs);
  out.projection = Eigen::MatrixXd::Zero(dim, channels);
  out.latent.resize(static_cast<Eigen::Index>(total_cells), dim);
  out.indices.reserve(total_cells);
  if (total_cells == 0) return out;

  const double m = static_cast<double>(total_cells);
  const double recon_scale = params.lambda_rec * 2.0 / (m * channels);
  const double commit_scale = params.beta * 2.0 / m;
  const Eigen::MatrixXd& w = params.conditional_decoder;

  double sse = 0.0;
  double gap = 0.0;
  std::vector<double> x(static_cast<std::size_t>(inputs));
  std::vector<double> residual(static_cast<std::size_t>(channels));
  Eigen::VectorXd grad_latent(dim);
  Eigen::VectorXd centered(channels);
  Eigen::Index out_row = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const internal::DesignRows& r = rows[b];
    const auto sender = batch[b].sender_pruned.values();
    const std::size_t stride = batch[b].sender_pruned.channel_stride();
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const int index = frozen != nullptr ? frozen->entries()[b].indices[i] : r.indices[i];
      const double* z = r.latent.row(row).data();
      const double* q = cb.codewords().row(index).data();
      for (int d = 0; d < dim; ++d) {
        // Forward value of the straight-through latent.
        x[d] = frozen != nullptr ? z[d] + frozen->entries()[b].residual(row, d) : q[d];
        x[dim + d] = r.inputs(row, dim + d);
      }
      x[2 * static_cast<std::size_t>(dim)] = 1.0;

      for (int c = 0; c < channels; ++c) {
        residual[c] = internal::Dot(w, c, x.data(), inputs) - r.targets(row, c);
        sse += residual[c] * residual[c];
        for (int j = 0; j < inputs; ++j) out.decoder(c, j) += residual[c] * x[j];
      }
      for (int d = 0; d < dim; ++d) {
        double g = 0.0;
        for (int c = 0; c < channels; ++c) g += residual[c] * w(c, d);
        const double diff = z[d] - q[d];
        gap += diff * diff;
        grad_latent(d) = recon_scale * g + commit_scale * diff;
      }
      const std::size_t cell = r.cells[i];
      for (int c = 0; c < channels; ++c) {
        centered(c) = sender[c * stride + cell] - params.encoder.mean(c);
      }
      out.projection.noalias() += grad_latent * centered.transpose();

      out.latent.row(out_row++) = r.latent.row(row);
      out.indices.push_back(static_cast<std::uint16_t>(index));
    }
  }
  out.decoder *= recon_scale;

  out.loss.recon_mse = sse / (m * channels);
  out.loss.codebook_loss = frozen != nullptr ? frozen->codebook_loss() : gap / m;
  out.loss.commitment_loss = params.beta * gap / m;
  out.loss.total = params.lambda_rec * out.loss.recon_mse + out.loss.codebook_loss +
                   out.loss.commitment_loss;
  return out;
}

Finetuner::Finetuner(CodecParams params, Codebook cb, double ema_decay)
    : params_(std::move(params)), codebook_(std::move(cb)), ema_(codebook_, ema_decay) {
  params_.Validate();
  if (params_.codebook_hash != codebook_.version_hash()) {
    throw Error(ErrorCode::kCodebookMismatch, "codec params reference a different codebook");
  }
}

FinetuneLoss Finetuner::Step(std::span<const TrainingPair> batch, double lr,
                             const FrozenAssignments* frozen) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be finite and >= 0");
  }
  FinetuneGradient g = finetune_gradient(params_, codebook_, batch, frozen);
  if (!std::isfinite(g.loss.total) || !g.decoder.allFinite() || !g.projection.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "fine-tuning loss " + std::to_string(g.loss.total));
  }
  if (lr == 0.0) return g.loss;

  CodecParams next = params_;
  next.conditional_decoder -= lr * g.decoder;
  next.encoder.matrix -= lr * g.projection;
  if (!next.conditional_decoder.allFinite() || !next.encoder.matrix.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "fine-tuning step diverged");
  }
  if (frozen == nullptr && !g.indices.empty()) {
    CodebookEma ema = ema_;
    Codebook refreshed = ema.Update(g.latent, g.indices);
    next.codebook_hash = refreshed.version_hash();
    ema_ = std::move(ema);
    codebook_ = std::move(refreshed);
  }
  params_ = std::move(next);
  return g.loss;
}

FinetuneStepResult finetune_step(const CodecParams& params, const Codebook& cb,
                                 std::span<const TrainingPair> batch, double lr) {
  Finetuner tuner(params, cb);
  const FinetuneLoss loss = tuner.Step(batch, lr);
  return {tuner.params(), tuner.codebook(), loss};
}

}  // namespace dsc
