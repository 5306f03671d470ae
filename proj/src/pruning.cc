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


#include "dsc/pruning.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsc/error.h"

namespace dsc {

ScoreMap score_map(const FeatureMap& f) {
  const std::size_t cells = f.shape().cells();
  ScoreMap s{f.height(), f.width(), std::vector<double>(cells, 0.0)};
  const auto values = f.values();
  for (int c = 0; c < f.channels(); ++c) {
    const float* plane = values.data() + c * cells;
    for (std::size_t i = 0; i < cells; ++i) s.scores[i] += static_cast<double>(plane[i]) * plane[i];
  }
  double max_norm = 0.0;
  for (double& v : s.scores) {
    v = std::sqrt(v);
    max_norm = std::max(max_norm, v);
  }
  if (max_norm == 0.0) return s;
  for (double& v : s.scores) v = std::min(v / max_norm, 1.0);
  return s;
}

Mask mask_from_scores(const ScoreMap& s, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must lie in [0, 1], got " + std::to_string(tau));
  }
  std::vector<std::uint8_t> bits(s.scores.size());
  std::transform(s.scores.begin(), s.scores.end(), bits.begin(),
                 [tau](double v) { return v > tau ? 1 : 0; });
  return Mask(s.height, s.width, std::move(bits));
}

double occupancy(const Mask& m) {
  return static_cast<double>(m.count()) / static_cast<double>(m.cells());
}

PrunedFeature prune(const FeatureMap& f, double tau) {
  Mask mask = mask_from_scores(score_map(f), tau);
  return {apply_mask(f, mask), std::move(mask)};
}

}  // namespace dsc
