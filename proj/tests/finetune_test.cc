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
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "dsc/error.h"
#include "dsc/pruning.h"
#include "dsc/rng.h"
#include "dsc/source_sim.h"

namespace dsc {
namespace {

struct Fixture {
  CodecParams params;
  Codebook codebook;
  std::vector<TrainingPair> batch;
};

Fixture Small(std::uint64_t seed = 1) {
  ScenarioConfig cfg;
  cfg.channels = 6;
  cfg.height = 12;
  cfg.width = 12;
  cfg.seed = seed;
  const Scene scene = generate_scene(cfg, 0);
  std::vector<TrainingPair> batch;
  std::vector<FeatureMap> senders;
  for (int j = 0; j < 2; ++j) {
    PrunedFeature p = prune(observe(scene, j, cfg), 0.2);
    senders.push_back(p.feature);
    batch.push_back({p.feature, p.mask, observe(scene, 1 - j, cfg)});
  }
  const Projection proj = fit_encoder_projection(senders, 3);
  Codebook cb = train_codebook(project_cells(senders[0], batch[0].mask, proj), 8, 10, seed);
  CodecParams params = make_codec_params(proj, cb, 1);
  const DecoderFit fit = fit_conditional_decoder(batch, params, cb, 1e-3);
  params.conditional_decoder = fit.conditional;
  params.unconditional_decoder = fit.unconditional;
  return {params, cb, batch};
}

double Loss(const CodecParams& p, const Codebook& cb, const std::vector<TrainingPair>& batch,
            const FrozenAssignments* frozen = nullptr) {
  return finetune_gradient(p, cb, batch, frozen).loss.total;
}

double RelativeError(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

TEST(FinetuneGradientTest, DecoderMatchesCentralDifferences) {
  const Fixture s = Small();
  Rng rng(2);
  const double h = 1e-5;
  double worst = 0.0;
  for (int point = 0; point < 100; ++point) {
    CodecParams p = s.params;
    for (Eigen::Index i = 0; i < p.conditional_decoder.size(); ++i) {
      p.conditional_decoder.data()[i] += 0.2 * rng.Normal();
    }
    const FinetuneGradient g = finetune_gradient(p, s.codebook, s.batch);
    const double scale = g.decoder.cwiseAbs().maxCoeff();
    for (int probe = 0; probe < 5; ++probe) {
      const auto c = static_cast<Eigen::Index>(rng.Index(static_cast<std::uint64_t>(p.channels)));
      const auto j = static_cast<Eigen::Index>(rng.Index(static_cast<std::uint64_t>(p.conditional_inputs())));
      CodecParams plus = p, minus = p;
      plus.conditional_decoder(c, j) += h;
      minus.conditional_decoder(c, j) -= h;
      const double fd = (Loss(plus, s.codebook, s.batch) - Loss(minus, s.codebook, s.batch)) / (2 * h);
      worst = std::max(worst, RelativeError(g.decoder(c, j), fd, 1e-3 * scale));
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(FinetuneGradientTest, ProjectionMatchesCentralDifferencesWhenFrozen) {
  const Fixture s = Small(3);
  const FrozenAssignments frozen = FrozenAssignments::Capture(s.params, s.codebook, s.batch);
  Rng rng(4);
  const double h = 1e-5;
  const FinetuneGradient g = finetune_gradient(s.params, s.codebook, s.batch, &frozen);
  const double scale = g.projection.cwiseAbs().maxCoeff();
  ASSERT_GT(scale, 0.0);
  for (Eigen::Index d = 0; d < g.projection.rows(); ++d) {
    for (Eigen::Index c = 0; c < g.projection.cols(); ++c) {
      CodecParams plus = s.params, minus = s.params;
      plus.encoder.matrix(d, c) += h;
      minus.encoder.matrix(d, c) -= h;
      const double fd = (Loss(plus, s.codebook, s.batch, &frozen) -
                         Loss(minus, s.codebook, s.batch, &frozen)) / (2 * h);
      EXPECT_LT(RelativeError(g.projection(d, c), fd, 1e-3 * scale), 1e-4) << d << "," << c;
    }
  }
}

TEST(FinetuneGradientTest, LossComponents) {
  const Fixture s = Small();
  const FinetuneGradient g = finetune_gradient(s.params, s.codebook, s.batch);
  EXPECT_NEAR(g.loss.commitment_loss, s.params.beta * g.loss.codebook_loss, 1e-12);
  EXPECT_NEAR(g.loss.total, s.params.lambda_rec * g.loss.recon_mse + g.loss.codebook_loss + g.loss.commitment_loss,
              1e-12);
  // Reconstruction term equals the mean squared error of the conditional decode.
  std::size_t cells = 0;
  double sse = 0.0;
  for (const TrainingPair& pair : s.batch) {
    const Message msg = encode_message(pair.sender_pruned, pair.mask, s.params, s.codebook);
    const FeatureMap rec = decode_message(msg, pair.receiver, s.params, s.codebook);
    sse += mse(rec, pair.sender_pruned) * static_cast<double>(rec.shape().size());
    cells += pair.mask.count();
  }
  EXPECT_NEAR(g.loss.recon_mse, sse / static_cast<double>(cells * s.params.channels), 1e-6);
}

TEST(FinetuneStepTest, ZeroLearningRateChangesNothing) {
  const Fixture s = Small();
  const FinetuneStepResult r = finetune_step(s.params, s.codebook, s.batch, 0.0);
  EXPECT_EQ(SerializeCodecParams(r.params), SerializeCodecParams(s.params));
  EXPECT_EQ(r.codebook.codewords(), s.codebook.codewords());
  EXPECT_EQ(r.loss.total, Loss(s.params, s.codebook, s.batch));
}

TEST(FinetuneStepTest, StepUpdatesCodebookConsistently) {
  const Fixture s = Small();
  const FinetuneStepResult r = finetune_step(s.params, s.codebook, s.batch, 1e-2);
  EXPECT_NE(SerializeCodecParams(r.params), SerializeCodecParams(s.params));
  EXPECT_EQ(r.params.codebook_hash, r.codebook.version_hash());
  EXPECT_NO_THROW(finetune_step(r.params, r.codebook, s.batch, 1e-2));
  EXPECT_THROW(finetune_step(r.params, s.codebook, s.batch, 1e-2), Error);
}

TEST(FinetuneStepTest, FrozenDescent) {
  const Fixture s = Small(5);
  Finetuner tuner(s.params, s.codebook);
  const FrozenAssignments frozen = FrozenAssignments::Capture(s.params, s.codebook, s.batch);
  double prev = tuner.Step(s.batch, 1e-3, &frozen).total;
  for (int step = 1; step < 20; ++step) {
    const double loss = tuner.Step(s.batch, 1e-3, &frozen).total;
    EXPECT_LE(loss, prev) << "step " << step;
    prev = loss;
  }
  EXPECT_EQ(tuner.codebook().version_hash(), s.codebook.version_hash());
}

TEST(FinetuneStepTest, NonFiniteLossRejectedAndStateKept) {
  const Fixture s = Small();
  CodecParams huge = s.params;
  huge.conditional_decoder.setConstant(1e200);
  Finetuner tuner(huge, s.codebook);
  try {
    tuner.Step(s.batch, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
  EXPECT_EQ(SerializeCodecParams(tuner.params()), SerializeCodecParams(huge));
  EXPECT_EQ(tuner.codebook().version_hash(), s.codebook.version_hash());
}

TEST(FinetuneStepTest, Errors) {
  const Fixture s = Small();
  EXPECT_THROW(finetune_step(s.params, s.codebook, s.batch, -1.0), Error);
  EXPECT_THROW(finetune_step(s.params, s.codebook, {}, 1e-3), Error);
  const FrozenAssignments frozen = FrozenAssignments::Capture(s.params, s.codebook, s.batch);
  const std::vector<TrainingPair> one = {s.batch[0]};
  EXPECT_THROW(finetune_gradient(s.params, s.codebook, one, &frozen), Error);
}

}  // namespace
}  // namespace dsc
