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

// Plug-in (empirical-frequency) entropy estimators over index sequences, in
// bits per symbol.

#ifndef DSC_INFO_THEORY_H_
#define DSC_INFO_THEORY_H_

#include "dsc/rans.h"
#include "dsc/vq.h"

namespace dsc {

double empirical_entropy(const IndexMap& x);
double joint_entropy(const IndexMap& x, const IndexMap& y);
// H(X, Y) - H(Y).
double conditional_entropy(const IndexMap& x, const IndexMap& y);
// H(X) - H(X | Y), clamped at zero against rounding dust.
double mutual_information(const IndexMap& x, const IndexMap& y);

// Average code length, in bits per symbol, of x under table frequencies
// freq / 2^precision. Infinite when x contains a zero-frequency symbol.
double cross_entropy(const IndexMap& x, const FrequencyTable& ft);

}  // namespace dsc

#endif  // DSC_INFO_THEORY_H_
