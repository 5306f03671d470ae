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

// Synthetic stand-in for backbone BEV features: a shared latent scene that
// evolves as an AR(1) process, observed by each agent through private noise
// and a visibility region. Everything is a pure function of the config seed
// and the (agent, time) indices.

#ifndef DSC_SOURCE_SIM_H_
#define DSC_SOURCE_SIM_H_

#include <cstdint>
#include <vector>

#include "dsc/feature_map.h"

namespace dsc {

struct ScenarioConfig {
  int num_agents = 3;
  int channels = 32;
  int height = 128;
  int width = 128;
  // Each agent sees rho * Z + sqrt(1 - rho^2 + obs_noise^2) * noise, so two
  // agents correlate at rho^2 / (1 + obs_noise^2) on co-visible cells.
  double rho = 0.9;
  double obs_noise = 0.0;
  // Fraction of cells every agent sees; the remainder is split into private
  // blocks, one per agent.
  double visibility_overlap = 1.0;
  // AR(1) coefficient of the latent scene across frames.
  double temporal_persistence = 0.9;
  // Radius of the box filter (applied twice) that smooths every latent field.
  int smoothing_radius = 2;
  std::uint64_t seed = 1;

  Shape shape() const { return {channels, height, width}; }
  // Throws ErrorCode::kInvalidArgument on an out-of-range field.
  void Validate() const;
};

struct Scene {
  Shape shape;
  int t = 0;
  // Unit-variance latent field, same layout as FeatureMap.
  std::vector<double> latent;
};

Scene generate_scene(const ScenarioConfig& cfg, int t);
// Scenes 0..t_max in one pass; element k equals generate_scene(cfg, k).
std::vector<Scene> generate_scene_sequence(const ScenarioConfig& cfg, int t_max);

Mask visibility_mask(const ScenarioConfig& cfg, int agent_id);
// Cells every pair of agents can see.
Mask covisible_mask(const ScenarioConfig& cfg);

FeatureMap observe(const Scene& scene, int agent_id, const ScenarioConfig& cfg);

struct PoseShift {
  int dh = 0;
  int dw = 0;
};

// Independent rounded-Gaussian row and column offsets.
PoseShift sample_pose_shift(double sigma_pose, std::uint64_t seed);
// out[c, h, w] = f[c, h - dh, w - dw]; cells shifted in from outside are 0.
FeatureMap shift_map(const FeatureMap& f, PoseShift shift);
FeatureMap perturb_pose(const FeatureMap& f, double sigma_pose, std::uint64_t seed);

// Pearson correlation pooled over all channels of the masked cells.
double empirical_correlation(const FeatureMap& a, const FeatureMap& b, const Mask& mask);

}  // namespace dsc

#endif  // DSC_SOURCE_SIM_H_
