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


#include "dsc/info_theory.h"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "dsc/error.h"

namespace dsc {

namespace {

template <typename Counts>
double EntropyOfCounts(const Counts& counts, std::size_t n) {
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (const auto& [key, count] : counts) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  return h;
}

void CheckPair(const IndexMap& x, const IndexMap& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kShapeMismatch, "sequence lengths " + std::to_string(x.size()) +
                                               " and " + std::to_string(y.size()));
  }
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "entropy of an empty sequence");
}

}  // namespace

double empirical_entropy(const IndexMap& x) {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "entropy of an empty sequence");
  std::map<std::uint16_t, std::size_t> counts;
  for (auto s : x) ++counts[s];
  return EntropyOfCounts(counts, x.size());
}

double joint_entropy(const IndexMap& x, const IndexMap& y) {
  CheckPair(x, y);
  std::map<std::uint32_t, std::size_t> counts;
  for (std::size_t i = 0; i < x.size(); ++i) ++counts[(std::uint32_t{x[i]} << 16) | y[i]];
  return EntropyOfCounts(counts, x.size());
}

double conditional_entropy(const IndexMap& x, const IndexMap& y) {
  const double h = joint_entropy(x, y) - empirical_entropy(y);
  return h < 0.0 ? 0.0 : h;
}

double mutual_information(const IndexMap& x, const IndexMap& y) {
  const double mi = empirical_entropy(x) - conditional_entropy(x, y);
  return mi < 1e-12 ? 0.0 : mi;
}

double cross_entropy(const IndexMap& x, const FrequencyTable& ft) {
  if (x.empty()) throw Error(ErrorCode::kInvalidArgument, "cross entropy of an empty sequence");
  double bits = 0.0;
  for (auto s : x) {
    if (s >= ft.size() || ft.freq(s) == 0) return std::numeric_limits<double>::infinity();
    bits += ft.precision() - std::log2(static_cast<double>(ft.freq(s)));
  }
  return bits / static_cast<double>(x.size());
}

}  // namespace dsc
