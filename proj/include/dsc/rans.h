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

// Static-model rANS: 32-bit state, lower bound 2^23, byte-wise
// renormalization. Symbols are encoded last-to-first and the emitted bytes
// reversed, so the decoder runs forward and ends exactly at the initial state.

#ifndef DSC_RANS_H_
#define DSC_RANS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dsc/vq.h"

namespace dsc {

inline constexpr std::uint32_t kRansLowerBound = 1u << 23;
inline constexpr int kDefaultPrecision = 12;

// Quantized symbol frequencies summing to exactly 2^precision.
class FrequencyTable {
 public:
  FrequencyTable(std::vector<std::uint32_t> frequencies, int precision);

  int size() const { return static_cast<int>(freq_.size()); }
  int precision() const { return precision_; }
  std::uint32_t total() const { return 1u << precision_; }
  std::uint32_t freq(int symbol) const { return freq_[static_cast<std::size_t>(symbol)]; }
  std::uint32_t cum(int symbol) const { return cum_[static_cast<std::size_t>(symbol)]; }
  const std::vector<std::uint32_t>& frequencies() const { return freq_; }

  bool operator==(const FrequencyTable&) const = default;

 private:
  std::vector<std::uint32_t> freq_;
  std::vector<std::uint32_t> cum_;  // size K + 1
  int precision_;
};

// Scales empirical counts to 2^precision. Every occurring symbol keeps a
// frequency of at least 1; the rounding remainder is settled by largest
// fractional part, ties to the lowest symbol.
FrequencyTable build_freq_table(const IndexMap& idx, int k, int precision = kDefaultPrecision);

struct RansStream {
  std::vector<std::uint8_t> payload;
  std::uint32_t final_state = kRansLowerBound;
};

RansStream rans_encode(const IndexMap& idx, const FrequencyTable& ft);
// Throws ErrorCode::kDecode when the payload is truncated, has leftover
// bytes, or does not return the coder to its initial state.
IndexMap rans_decode(std::span<const std::uint8_t> payload, const FrequencyTable& ft,
                     std::size_t count, std::uint32_t state);

}  // namespace dsc

#endif  // DSC_RANS_H_
