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

// Dense C x H x W feature maps, spatial masks, and the elementwise operations
// the rest of the codec builds on.

#ifndef DSC_FEATURE_MAP_H_
#define DSC_FEATURE_MAP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dsc {

struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t cells() const { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const { return cells() * channels; }
  bool operator==(const Shape&) const = default;
};

std::string ToString(const Shape& shape);

// Values are stored row-major, channel first: index = (c * H + h) * W + w.
// Every value is finite; construction rejects NaN/Inf.
class FeatureMap {
 public:
  FeatureMap() = default;
  // Zero-filled map.
  explicit FeatureMap(Shape shape);
  FeatureMap(Shape shape, std::vector<float> values);

  const Shape& shape() const { return shape_; }
  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }

  float at(int c, int h, int w) const { return values_[Offset(c, h, w)]; }
  // Callers writing through set() must keep values finite.
  void set(int c, int h, int w, float v) { values_[Offset(c, h, w)] = v; }

  std::span<const float> values() const { return values_; }

  // Distance between channels of the same cell.
  std::size_t channel_stride() const { return shape_.cells(); }

  bool operator==(const FeatureMap&) const = default;

 private:
  std::size_t Offset(int c, int h, int w) const {
    return (static_cast<std::size_t>(c) * shape_.height + h) * shape_.width + w;
  }

  Shape shape_;
  std::vector<float> values_;
};

class Mask {
 public:
  Mask() = default;
  Mask(int height, int width, bool fill = false);
  Mask(int height, int width, std::vector<std::uint8_t> bits);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t cells() const { return bits_.size(); }

  bool at(int h, int w) const { return bits_[static_cast<std::size_t>(h) * width_ + w] != 0; }
  bool at(std::size_t cell) const { return bits_[cell] != 0; }
  void set(int h, int w, bool v) { bits_[static_cast<std::size_t>(h) * width_ + w] = v ? 1 : 0; }

  std::size_t count() const;

  // Bit-packed, row-major, least-significant bit first within each byte.
  std::vector<std::uint8_t> Pack() const;
  static Mask Unpack(int height, int width, std::span<const std::uint8_t> packed);

  bool operator==(const Mask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

FeatureMap apply_mask(const FeatureMap& f, const Mask& m);
FeatureMap elementwise_max(const FeatureMap& a, const FeatureMap& b);
double mse(const FeatureMap& a, const FeatureMap& b);
std::uint64_t raw_payload_bytes(std::uint64_t channels, std::uint64_t height,
                                std::uint64_t width, std::uint64_t bits_per_scalar);

// FMAP file: "FMAP", u16 C, u16 H, u16 W, then C*H*W little-endian f32.
std::vector<std::uint8_t> SerializeFeatureMap(const FeatureMap& f);
FeatureMap ParseFeatureMap(std::span<const std::uint8_t> bytes);
void WriteFeatureMap(const std::string& path, const FeatureMap& f);
FeatureMap ReadFeatureMap(const std::string& path);

}  // namespace dsc

#endif  // DSC_FEATURE_MAP_H_
