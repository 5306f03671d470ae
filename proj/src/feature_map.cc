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


#include "dsc/feature_map.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "dsc/byte_io.h"
#include "dsc/error.h"

namespace dsc {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kCodebookMismatch: return "codebook mismatch";
    case ErrorCode::kIndexOutOfRange: return "index out of range";
    case ErrorCode::kDecode: return "decode error";
    case ErrorCode::kUndefinedCorrelation: return "undefined correlation";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kIo: return "i/o error";
  }
  return "error";
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

std::string ToString(const Shape& shape) {
  return std::to_string(shape.channels) + "x" + std::to_string(shape.height) + "x" +
         std::to_string(shape.width);
}

namespace {

void CheckShape(const Shape& shape) {
  if (shape.channels < 1 || shape.height < 1 || shape.width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "feature map dimensions must be >= 1, got " +
                                                 ToString(shape));
  }
}

void RequireSameShape(const FeatureMap& a, const FeatureMap& b) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorCode::kShapeMismatch, ToString(a.shape()) + " vs " + ToString(b.shape()));
  }
}

}  // namespace

FeatureMap::FeatureMap(Shape shape) : shape_(shape) {
  CheckShape(shape_);
  values_.assign(shape_.size(), 0.0f);
}

FeatureMap::FeatureMap(Shape shape, std::vector<float> values)
    : shape_(shape), values_(std::move(values)) {
  CheckShape(shape_);
  if (values_.size() != shape_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(shape_.size()) +
                                               " values, got " + std::to_string(values_.size()));
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "feature map value");
  }
}

Mask::Mask(int height, int width, bool fill)
    : height_(height), width_(width),
      bits_(static_cast<std::size_t>(std::max(height, 0)) * std::max(width, 0), fill ? 1 : 0) {
  if (height < 1 || width < 1) throw Error(ErrorCode::kInvalidArgument, "mask dimensions");
}

Mask::Mask(int height, int width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  if (height < 1 || width < 1) throw Error(ErrorCode::kInvalidArgument, "mask dimensions");
  if (bits_.size() != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorCode::kShapeMismatch, "mask bit count");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<std::uint8_t> Mask::Pack() const {
  std::vector<std::uint8_t> packed((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return packed;
}

Mask Mask::Unpack(int height, int width, std::span<const std::uint8_t> packed) {
  Mask m(height, width);
  if (packed.size() != (m.bits_.size() + 7) / 8) {
    throw Error(ErrorCode::kParse, "packed mask has " + std::to_string(packed.size()) +
                                       " bytes for " + std::to_string(m.bits_.size()) + " cells");
  }
  for (std::size_t i = 0; i < m.bits_.size(); ++i) {
    m.bits_[i] = (packed[i / 8] >> (i % 8)) & 1u;
  }
  // Padding bits in the final byte must be clear so that the encoding is canonical.
  const std::size_t tail = m.bits_.size() % 8;
  if (tail != 0 && (packed.back() >> tail) != 0) {
    throw Error(ErrorCode::kParse, "nonzero mask padding bits");
  }
  return m;
}

FeatureMap apply_mask(const FeatureMap& f, const Mask& m) {
  if (m.height() != f.height() || m.width() != f.width()) {
    throw Error(ErrorCode::kShapeMismatch, "mask " + std::to_string(m.height()) + "x" +
                                               std::to_string(m.width()) + " vs map " +
                                               ToString(f.shape()));
  }
  std::vector<float> out(f.values().begin(), f.values().end());
  const std::size_t cells = f.shape().cells();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (m.at(cell)) continue;
    for (int c = 0; c < f.channels(); ++c) out[c * cells + cell] = 0.0f;
  }
  return FeatureMap(f.shape(), std::move(out));
}

FeatureMap elementwise_max(const FeatureMap& a, const FeatureMap& b) {
  RequireSameShape(a, b);
  std::vector<float> out(a.values().size());
  std::transform(a.values().begin(), a.values().end(), b.values().begin(), out.begin(),
                 [](float x, float y) { return std::max(x, y); });
  return FeatureMap(a.shape(), std::move(out));
}

double mse(const FeatureMap& a, const FeatureMap& b) {
  RequireSameShape(a, b);
  double sum = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = static_cast<double>(av[i]) - bv[i];
    sum += d * d;
  }
  return sum / static_cast<double>(av.size());
}

std::uint64_t raw_payload_bytes(std::uint64_t channels, std::uint64_t height,
                                std::uint64_t width, std::uint64_t bits_per_scalar) {
  if (channels == 0 || height == 0 || width == 0 || bits_per_scalar == 0) {
    throw Error(ErrorCode::kInvalidArgument, "raw payload arguments must be >= 1");
  }
  const std::uint64_t bits = channels * height * width * bits_per_scalar;
  return (bits + 7) / 8;
}

std::vector<std::uint8_t> SerializeFeatureMap(const FeatureMap& f) {
  const Shape& s = f.shape();
  if (s.channels > 0xFFFF || s.height > 0xFFFF || s.width > 0xFFFF) {
    throw Error(ErrorCode::kInvalidArgument, "dimension exceeds u16 in FMAP format");
  }
  ByteWriter w;
  w.Tag("FMAP");
  w.U16(static_cast<std::uint16_t>(s.channels));
  w.U16(static_cast<std::uint16_t>(s.height));
  w.U16(static_cast<std::uint16_t>(s.width));
  for (float v : f.values()) w.F32(v);
  return w.Take();
}

FeatureMap ParseFeatureMap(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectTag("FMAP");
  Shape s;
  s.channels = r.U16();
  s.height = r.U16();
  s.width = r.U16();
  if (s.channels == 0 || s.height == 0 || s.width == 0) {
    throw Error(ErrorCode::kParse, "FMAP with zero dimension");
  }
  if (r.remaining() != s.size() * 4) {
    throw Error(ErrorCode::kParse, "FMAP payload length does not match " + ToString(s));
  }
  std::vector<float> values(s.size());
  for (auto& v : values) v = r.F32();
  return FeatureMap(s, std::move(values));
}

void WriteFeatureMap(const std::string& path, const FeatureMap& f) {
  WriteFileBytes(path, SerializeFeatureMap(f));
}

FeatureMap ReadFeatureMap(const std::string& path) { return ParseFeatureMap(ReadFileBytes(path)); }

}  // namespace dsc
