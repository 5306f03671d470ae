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

// End-to-end orchestration: fitting a codec on simulated training scenes,
// running budgeted sender->receiver links, max-fusion at the receiver, and the
// rate-distortion and robustness sweeps that emit CSV.

#ifndef DSC_PIPELINE_H_
#define DSC_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsc/codec.h"
#include "dsc/feature_map.h"
#include "dsc/source_sim.h"
#include "dsc/vq.h"

namespace dsc {

struct CodecKnobs {
  double tau = 0.5;
  int codebook_size = 64;
  int embed_dim = 64;
};

// Everything a run depends on. Serialized as "key = value" lines; see
// ParseExperimentConfig for the accepted keys.
struct ExperimentConfig {
  ScenarioConfig scenario;
  CodecKnobs knobs;
  int context_radius = 1;
  double lambda_ridge = 1e-3;
  double lambda_rec = 1.0;
  double beta = 0.25;
  int kmeans_iters = 25;
  int kmeans_max_samples = 16384;
  // Pruning threshold applied to training senders; the fitted codec is then
  // reused for every inference-time tau.
  double train_tau = 0.0;
  int train_scenes = 4;
  int eval_scenes = 4;
  // Frame at which links are evaluated; must be >= every delay used.
  int time_index = 8;
  // Per-message budget in bytes; 0 disables the budget.
  std::uint64_t budget_bytes = 0;
  // Drop over-budget links instead of only flagging them.
  bool enforce_budget = false;

  void Validate() const;
};

ExperimentConfig ParseExperimentConfig(std::string_view text);
std::string FormatExperimentConfig(const ExperimentConfig& cfg);
ExperimentConfig ReadExperimentConfig(const std::string& path);

struct CodecBundle {
  CodecParams params;
  Codebook codebook;
  DecoderFit fit;
};

// Trains projection, codebook and both decoders at (K, D) on the config's
// training scenes. tau in `knobs` is not used for fitting.
CodecBundle fit_codec(const ExperimentConfig& cfg, const CodecKnobs& knobs);

// Scene sequence for one seeded episode, generated once and shared by links.
class Episode {
 public:
  Episode(const ScenarioConfig& cfg, int t_max);

  const ScenarioConfig& config() const { return cfg_; }
  const Scene& scene(int t) const;
  FeatureMap observe(int agent_id, int t) const;

 private:
  ScenarioConfig cfg_;
  std::vector<Scene> scenes_;
};

// Scenario of the s-th evaluation (or training) episode.
ScenarioConfig eval_scenario(const ExperimentConfig& cfg, int scene_index);
ScenarioConfig train_scenario(const ExperimentConfig& cfg, int scene_index);

struct Perturbation {
  double sigma_pose = 0.0;  // cells
  int delay = 0;            // frames
};

enum class DecoderMode {
  kConditional,
  kUnconditional,
  // Delivers the pruned sender feature untouched; payload is its raw f32 size.
  kIdentity,
};

struct LinkResult {
  int sender = 0;
  int receiver = 0;
  std::size_t payload_bytes = 0;
  std::uint64_t budget_bytes = 0;  // 0 = unlimited
  bool within_budget = true;
  bool dropped = false;  // over budget with enforcement on
  bool failed = false;   // message did not decode
  double occupancy = 0.0;
  double recon_mse = 0.0;
  double fusion_mse = 0.0;
  // What the receiver fuses: empty-equivalent (all zeros) when dropped/failed.
  FeatureMap reconstruction;
  bool delivered() const { return !dropped && !failed; }
};

LinkResult run_link(const ExperimentConfig& cfg, const Episode& episode, int t, int sender,
                    int receiver, const CodecBundle& codec, const Perturbation& perturbation,
                    DecoderMode mode = DecoderMode::kConditional);

// Fold of elementwise_max over the local map and every reconstruction.
FeatureMap fuse_all(const FeatureMap& local, std::span<const FeatureMap> reconstructions);

struct ReceiverResult {
  std::vector<LinkResult> links;
  FeatureMap fused;  // local fused with delivered links only
};

ReceiverResult run_receiver(const ExperimentConfig& cfg, const Episode& episode, int t,
                            int receiver, const CodecBundle& codec,
                            const Perturbation& perturbation,
                            DecoderMode mode = DecoderMode::kConditional);

struct RDPoint {
  CodecKnobs knobs;
  double rho = 0.0;
  Perturbation perturbation;
  bool conditional = true;
  double payload_bytes = 0.0;
  double recon_mse = 0.0;
  double fusion_mse = 0.0;
  // Mean fraction of cells kept by the pruning masks; not written to CSV.
  double occupancy = 0.0;
  int scenes = 0;
  std::size_t links = 0;
  std::uint64_t seed = 0;
};

// Averages every directed link of eval_scenes episodes.
RDPoint evaluate_point(const ExperimentConfig& cfg, const CodecBundle& codec,
                       const CodecKnobs& knobs, const Perturbation& perturbation,
                       DecoderMode mode, int scenes);

struct SweepGrid {
  std::vector<double> taus;
  std::vector<int> codebook_sizes;
  std::vector<int> embed_dims;
};

// One point per (K, D, tau), sorted in that key order. Codecs are fitted once
// per (K, D).
std::vector<RDPoint> rd_sweep(const ExperimentConfig& cfg, const SweepGrid& grid, int scenes);

struct RobustnessRow {
  RDPoint conditional;
  RDPoint unconditional;
};

// One row per (sigma, delay), sorted by sigma then delay, with a single codec
// fitted at cfg.knobs.
std::vector<RobustnessRow> robustness_sweep(const ExperimentConfig& cfg,
                                            std::span<const double> sigmas,
                                            std::span<const int> delays, int scenes);

inline constexpr std::string_view kRdCsvHeader =
    "tau,K,D,rho,sigma_pose,delay,payload_bytes,recon_mse,fusion_mse,conditional,seed,scenes";
inline constexpr std::string_view kRobustnessCsvExtra =
    ",uncond_recon_mse,uncond_fusion_mse,recon_gap";
inline constexpr std::string_view kLinkCsvHeader =
    "scene,sender,receiver,payload_bytes,budget_bytes,within_budget,delivered,recon_mse,fusion_mse";

// Shared column formatting for RD rows (no trailing newline).
std::string FormatRdRow(const RDPoint& p);
void WriteRdCsv(std::ostream& out, std::span<const RDPoint> points);
void WriteRobustnessCsv(std::ostream& out, std::span<const RobustnessRow> rows);

}  // namespace dsc

#endif  // DSC_PIPELINE_H_
