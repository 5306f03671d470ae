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


#include "dsc/rans.h"

#include <algorithm>
#include <queue>
#include <string>

#include "dsc/error.h"

namespace dsc {

FrequencyTable::FrequencyTable(std::vector<std::uint32_t> frequencies, int precision)
    : freq_(std::move(frequencies)), precision_(precision) {
  if (precision < 1 || precision > 16) {
    throw Error(ErrorCode::kInvalidArgument, "precision must lie in [1, 16]");
  }
  if (freq_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty frequency table");
  cum_.assign(freq_.size() + 1, 0);
  std::uint64_t acc = 0;
  for (std::size_t k = 0; k < freq_.size(); ++k) {
    cum_[k] = static_cast<std::uint32_t>(std::min<std::uint64_t>(acc, UINT32_MAX));
    acc += freq_[k];
  }
  if (acc != total()) {
    throw Error(ErrorCode::kInvalidArgument, "frequencies sum to " + std::to_string(acc) +
                                                 ", expected " + std::to_string(total()));
  }
  cum_.back() = static_cast<std::uint32_t>(acc);
}

FrequencyTable build_freq_table(const IndexMap& idx, int k, int precision) {
  if (idx.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot build a table for no symbols");
  if (precision < 8 || precision > 16) {
    throw Error(ErrorCode::kInvalidArgument, "precision must lie in [8, 16]");
  }
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k), 0);
  for (std::uint16_t s : idx) {
    if (s >= k) throw Error(ErrorCode::kIndexOutOfRange, "symbol " + std::to_string(s));
    ++counts[s];
  }
  const std::uint64_t total = std::uint64_t{1} << precision;
  const std::uint64_t n = idx.size();
  const auto distinct = static_cast<std::uint64_t>(
      std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c > 0; }));
  if (distinct > total) {
    throw Error(ErrorCode::kInvalidArgument, std::to_string(distinct) +
                                                 " distinct symbols exceed 2^precision");
  }

  std::vector<std::uint32_t> freq(static_cast<std::size_t>(k), 0);
  std::vector<std::uint64_t> remainder(static_cast<std::size_t>(k), 0);
  std::uint64_t sum = 0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] == 0) continue;
    const std::uint64_t scaled = counts[s] * total;
    freq[s] = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, scaled / n));
    remainder[s] = scaled % n;
    sum += freq[s];
  }

  if (sum < total) {
    // Shortfall is below the number of occurring symbols, so one pass suffices.
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (counts[s] > 0) order.push_back(s);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return remainder[a] > remainder[b];
    });
    for (std::size_t i = 0; sum < total; i = (i + 1) % order.size()) {
      ++freq[order[i]];
      ++sum;
    }
  } else if (sum > total) {
    // The floor-at-one rule overshot; take the excess from the largest bins.
    auto cmp = [&](std::size_t a, std::size_t b) {
      return freq[a] != freq[b] ? freq[a] < freq[b] : a > b;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
    for (std::size_t s = 0; s < freq.size(); ++s) {
      if (freq[s] > 1) heap.push(s);
    }
    while (sum > total) {
      const std::size_t s = heap.top();
      heap.pop();
      --freq[s];
      --sum;
      if (freq[s] > 1) heap.push(s);
    }
  }
  return FrequencyTable(std::move(freq), precision);
}

RansStream rans_encode(const IndexMap& idx, const FrequencyTable& ft) {
  const int p = ft.precision();
  std::vector<std::uint8_t> emitted;
  emitted.reserve(idx.size());
  std::uint32_t x = kRansLowerBound;
  for (std::size_t i = idx.size(); i-- > 0;) {
    const int s = idx[i];
    if (s >= ft.size()) throw Error(ErrorCode::kIndexOutOfRange, "symbol " + std::to_string(s));
    const std::uint32_t f = ft.freq(s);
    if (f == 0) {
      throw Error(ErrorCode::kInvalidArgument, "symbol " + std::to_string(s) + " has zero frequency");
    }
    const std::uint32_t x_max = ((kRansLowerBound >> p) << 8) * f;
    while (x >= x_max) {
      emitted.push_back(static_cast<std::uint8_t>(x & 0xFF));
      x >>= 8;
    }
    x = ((x / f) << p) + (x % f) + ft.cum(s);
  }
  std::reverse(emitted.begin(), emitted.end());
  return {std::move(emitted), x};
}

IndexMap rans_decode(std::span<const std::uint8_t> payload, const FrequencyTable& ft,
                     std::size_t count, std::uint32_t state) {
  if (state < kRansLowerBound || state >= (kRansLowerBound << 8)) {
    throw Error(ErrorCode::kDecode, "coder state outside [2^23, 2^31)");
  }
  const int p = ft.precision();
  const std::uint32_t mask = ft.total() - 1;
  std::vector<std::uint16_t> slot_symbol(ft.total());
  for (int s = 0; s < ft.size(); ++s) {
    std::fill(slot_symbol.begin() + ft.cum(s), slot_symbol.begin() + ft.cum(s + 1),
              static_cast<std::uint16_t>(s));
  }
  IndexMap out(count);
  std::uint32_t x = state;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t slot = x & mask;
    const std::uint16_t s = slot_symbol[slot];
    x = ft.freq(s) * (x >> p) + slot - ft.cum(s);
    while (x < kRansLowerBound) {
      if (pos >= payload.size()) {
        throw Error(ErrorCode::kDecode, "payload truncated after " + std::to_string(i) + " symbols");
      }
      x = (x << 8) | payload[pos++];
    }
    out[i] = s;
  }
  if (pos != payload.size()) {
    throw Error(ErrorCode::kDecode, std::to_string(payload.size() - pos) + " unread payload bytes");
  }
  if (x != kRansLowerBound) throw Error(ErrorCode::kDecode, "final coder state mismatch");
  return out;
}

}  // namespace dsc
