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


#include "dsc/source_sim.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsc/error.h"
#include "dsc/rng.h"

namespace dsc {

namespace {

constexpr std::uint64_t kLatentStream = 0x5a;
constexpr std::uint64_t kObservationStream = 0xb5;

// 1-D kernel of a box of the given radius convolved with itself, folded onto a
// periodic axis of length n and scaled to unit L2 norm so that smoothing white
// noise leaves its variance at exactly 1.
std::vector<double> FoldedSmoothingKernel(int radius, int n) {
  const int width = 2 * radius + 1;
  std::vector<double> folded(static_cast<std::size_t>(n), 0.0);
  for (int offset = -2 * radius; offset <= 2 * radius; ++offset) {
    const double weight = static_cast<double>(width - std::abs(offset));
    const int slot = ((offset % n) + n) % n;
    folded[static_cast<std::size_t>(slot)] += weight;
  }
  double norm = 0.0;
  for (double k : folded) norm += k * k;
  norm = std::sqrt(norm);
  for (double& k : folded) k /= norm;
  return folded;
}

struct Tap {
  int offset;
  double weight;
};

std::vector<Tap> NonzeroTaps(const std::vector<double>& kernel) {
  std::vector<Tap> taps;
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    if (kernel[k] != 0.0) taps.push_back({static_cast<int>(k), kernel[k]});
  }
  return taps;
}

// Circular convolution of every channel with kh along rows and kw along columns.
void SmoothPeriodic(std::vector<double>& field, const Shape& shape, const std::vector<double>& kh,
                    const std::vector<double>& kw) {
  const int h_len = shape.height;
  const int w_len = shape.width;
  const auto h_taps = NonzeroTaps(kh);
  const auto w_taps = NonzeroTaps(kw);
  std::vector<double> tmp(static_cast<std::size_t>(h_len) * w_len);
  for (int c = 0; c < shape.channels; ++c) {
    double* plane = field.data() + static_cast<std::size_t>(c) * h_len * w_len;
    for (int h = 0; h < h_len; ++h) {
      for (int w = 0; w < w_len; ++w) {
        double acc = 0.0;
        for (const Tap& tap : w_taps) acc += tap.weight * plane[h * w_len + (w - tap.offset + w_len) % w_len];
        tmp[h * w_len + w] = acc;
      }
    }
    for (int h = 0; h < h_len; ++h) {
      for (int w = 0; w < w_len; ++w) {
        double acc = 0.0;
        for (const Tap& tap : h_taps) acc += tap.weight * tmp[((h - tap.offset + h_len) % h_len) * w_len + w];
        plane[h * w_len + w] = acc;
      }
    }
  }
}

std::vector<double> SmoothNoiseField(const ScenarioConfig& cfg, int t) {
  const Shape shape = cfg.shape();
  std::vector<double> field(shape.size());
  Rng rng(MixSeed({cfg.seed, kLatentStream, static_cast<std::uint64_t>(t)}));
  for (double& v : field) v = rng.Normal();
  if (cfg.smoothing_radius > 0) {
    SmoothPeriodic(field, shape, FoldedSmoothingKernel(cfg.smoothing_radius, shape.height),
                   FoldedSmoothingKernel(cfg.smoothing_radius, shape.width));
  }
  return field;
}

void CheckAgent(const ScenarioConfig& cfg, int agent_id) {
  if (agent_id < 0 || agent_id >= cfg.num_agents) {
    throw Error(ErrorCode::kInvalidArgument, "agent id " + std::to_string(agent_id) +
                                                 " outside [0, " +
                                                 std::to_string(cfg.num_agents) + ")");
  }
}

std::size_t SharedCellCount(const ScenarioConfig& cfg) {
  const auto cells = cfg.shape().cells();
  return static_cast<std::size_t>(std::llround(cfg.visibility_overlap * static_cast<double>(cells)));
}

}  // namespace

void ScenarioConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (num_agents < 2) fail("num_agents must be >= 2");
  if (channels < 1 || height < 1 || width < 1) fail("dimensions must be >= 1");
  if (channels > 0xFFFF || height > 0xFFFF || width > 0xFFFF) fail("dimensions must fit u16");
  if (!(rho >= 0.0 && rho <= 1.0)) fail("rho must lie in [0, 1]");
  if (!(obs_noise >= 0.0) || !std::isfinite(obs_noise)) fail("obs_noise must be >= 0");
  if (!(visibility_overlap >= 0.0 && visibility_overlap <= 1.0)) {
    fail("visibility_overlap must lie in [0, 1]");
  }
  if (!(temporal_persistence >= 0.0 && temporal_persistence < 1.0)) {
    fail("temporal_persistence must lie in [0, 1)");
  }
  if (smoothing_radius < 0) fail("smoothing_radius must be >= 0");
}

std::vector<Scene> generate_scene_sequence(const ScenarioConfig& cfg, int t_max) {
  cfg.Validate();
  if (t_max < 0) throw Error(ErrorCode::kInvalidArgument, "time index must be >= 0");
  const double alpha = cfg.temporal_persistence;
  const double innovation = std::sqrt(1.0 - alpha * alpha);
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(t_max) + 1);
  scenes.push_back({cfg.shape(), 0, SmoothNoiseField(cfg, 0)});
  for (int t = 1; t <= t_max; ++t) {
    std::vector<double> z = SmoothNoiseField(cfg, t);
    const auto& prev = scenes.back().latent;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = alpha * prev[i] + innovation * z[i];
    scenes.push_back({cfg.shape(), t, std::move(z)});
  }
  return scenes;
}

Scene generate_scene(const ScenarioConfig& cfg, int t) {
  return std::move(generate_scene_sequence(cfg, t).back());
}

Mask visibility_mask(const ScenarioConfig& cfg, int agent_id) {
  cfg.Validate();
  CheckAgent(cfg, agent_id);
  const std::size_t cells = cfg.shape().cells();
  const std::size_t shared = SharedCellCount(cfg);
  const std::size_t private_cells = cells - shared;
  std::vector<std::uint8_t> bits(cells, 0);
  for (std::size_t i = 0; i < cells; ++i) {
    if (i < shared) {
      bits[i] = 1;
    } else {
      const std::size_t owner = (i - shared) * static_cast<std::size_t>(cfg.num_agents) / private_cells;
      bits[i] = owner == static_cast<std::size_t>(agent_id) ? 1 : 0;
    }
  }
  return Mask(cfg.height, cfg.width, std::move(bits));
}

Mask covisible_mask(const ScenarioConfig& cfg) {
  cfg.Validate();
  const std::size_t cells = cfg.shape().cells();
  const std::size_t shared = SharedCellCount(cfg);
  std::vector<std::uint8_t> bits(cells, 0);
  std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(shared), 1);
  return Mask(cfg.height, cfg.width, std::move(bits));
}

FeatureMap observe(const Scene& scene, int agent_id, const ScenarioConfig& cfg) {
  cfg.Validate();
  CheckAgent(cfg, agent_id);
  if (scene.shape != cfg.shape()) {
    throw Error(ErrorCode::kShapeMismatch, "scene " + ToString(scene.shape) + " vs config " +
                                               ToString(cfg.shape()));
  }
  const Mask visible = visibility_mask(cfg, agent_id);
  const double noise_scale = std::sqrt(1.0 - cfg.rho * cfg.rho + cfg.obs_noise * cfg.obs_noise);
  Rng rng(MixSeed({cfg.seed, kObservationStream, static_cast<std::uint64_t>(agent_id),
                   static_cast<std::uint64_t>(scene.t)}));
  const std::size_t cells = scene.shape.cells();
  std::vector<float> values(scene.latent.size(), 0.0f);
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Draw for every cell so the stream does not depend on the visibility layout.
    const double noise = rng.Normal();
    if (!visible.at(i % cells)) continue;
    values[i] = static_cast<float>(cfg.rho * scene.latent[i] + noise_scale * noise);
  }
  return FeatureMap(scene.shape, std::move(values));
}

PoseShift sample_pose_shift(double sigma_pose, std::uint64_t seed) {
  if (!(sigma_pose >= 0.0) || !std::isfinite(sigma_pose)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_pose must be >= 0");
  }
  if (sigma_pose == 0.0) return {};
  Rng rng(seed);
  PoseShift s;
  s.dh = static_cast<int>(std::lround(sigma_pose * rng.Normal()));
  s.dw = static_cast<int>(std::lround(sigma_pose * rng.Normal()));
  return s;
}

FeatureMap shift_map(const FeatureMap& f, PoseShift shift) {
  FeatureMap out(f.shape());
  for (int c = 0; c < f.channels(); ++c) {
    for (int h = 0; h < f.height(); ++h) {
      const int src_h = h - shift.dh;
      if (src_h < 0 || src_h >= f.height()) continue;
      for (int w = 0; w < f.width(); ++w) {
        const int src_w = w - shift.dw;
        if (src_w < 0 || src_w >= f.width()) continue;
        out.set(c, h, w, f.at(c, src_h, src_w));
      }
    }
  }
  return out;
}

FeatureMap perturb_pose(const FeatureMap& f, double sigma_pose, std::uint64_t seed) {
  return shift_map(f, sample_pose_shift(sigma_pose, seed));
}

double empirical_correlation(const FeatureMap& a, const FeatureMap& b, const Mask& mask) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorCode::kShapeMismatch, ToString(a.shape()) + " vs " + ToString(b.shape()));
  }
  if (mask.height() != a.height() || mask.width() != a.width()) {
    throw Error(ErrorCode::kShapeMismatch, "correlation mask");
  }
  if (mask.count() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "correlation needs at least 2 masked cells");
  }
  const std::size_t cells = a.shape().cells();
  const auto av = a.values();
  const auto bv = b.values();
  double sum_a = 0.0, sum_b = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    if (!mask.at(i % cells)) continue;
    sum_a += av[i];
    sum_b += bv[i];
    ++n;
  }
  const double mean_a = sum_a / static_cast<double>(n);
  const double mean_b = sum_b / static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    if (!mask.at(i % cells)) continue;
    const double da = av[i] - mean_a;
    const double db = bv[i] - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "constant input over the masked cells");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace dsc
