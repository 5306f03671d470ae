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


#ifndef DSC_PRUNING_H_
#define DSC_PRUNING_H_

#include <vector>

#include "dsc/feature_map.h"

namespace dsc {

// Per-cell relevance in [0, 1], row-major H x W.
struct ScoreMap {
  int height = 0;
  int width = 0;
  std::vector<double> scores;

  double at(int h, int w) const { return scores[static_cast<std::size_t>(h) * width + w]; }
};

// Channel-vector L2 norm of each cell divided by the largest such norm.
// An all-zero map scores zero everywhere.
ScoreMap score_map(const FeatureMap& f);

// Keeps cells whose score is strictly greater than tau; tau must lie in [0, 1].
Mask mask_from_scores(const ScoreMap& s, double tau);

double occupancy(const Mask& m);

// Convenience for the sender side: score, threshold, apply.
struct PrunedFeature {
  FeatureMap feature;
  Mask mask;
};
PrunedFeature prune(const FeatureMap& f, double tau);

}  // namespace dsc

#endif  // DSC_PRUNING_H_
