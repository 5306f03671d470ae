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


#include "dsc/codec.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "codec_internal.h"
#include "dsc/byte_io.h"
#include "dsc/error.h"

namespace dsc {

namespace internal {

std::vector<std::size_t> MaskedCells(const Mask& mask) {
  std::vector<std::size_t> cells;
  cells.reserve(mask.count());
  for (std::size_t i = 0; i < mask.cells(); ++i) {
    if (mask.at(i)) cells.push_back(i);
  }
  return cells;
}

void ProjectCell(const FeatureMap& f, std::size_t cell, const Projection& projection, double* out) {
  const auto values = f.values();
  const std::size_t stride = f.channel_stride();
  const Eigen::Index channels = projection.matrix.cols();
  for (Eigen::Index d = 0; d < projection.matrix.rows(); ++d) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < channels; ++c) {
      acc += projection.matrix(d, c) * (values[c * stride + cell] - projection.mean(c));
    }
    out[d] = acc;
  }
}

std::vector<double> BoxMean(const FeatureMap& f, int radius) {
  const int h_len = f.height();
  const int w_len = f.width();
  const int channels = f.channels();
  const double norm = 1.0 / static_cast<double>((2 * radius + 1) * (2 * radius + 1));
  std::vector<double> out(f.shape().size(), 0.0);
  for (int h = 0; h < h_len; ++h) {
    for (int w = 0; w < w_len; ++w) {
      double* dst = out.data() + (static_cast<std::size_t>(h) * w_len + w) * channels;
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int dh = -radius; dh <= radius; ++dh) {
          const int hh = h + dh;
          if (hh < 0 || hh >= h_len) continue;
          for (int dw = -radius; dw <= radius; ++dw) {
            const int ww = w + dw;
            if (ww < 0 || ww >= w_len) continue;
            acc += f.at(c, hh, ww);
          }
        }
        dst[c] = acc * norm;
      }
    }
  }
  return out;
}

void CheckPair(const TrainingPair& pair, const CodecParams& params) {
  const Shape& s = pair.sender_pruned.shape();
  if (s.channels != params.channels) {
    throw Error(ErrorCode::kShapeMismatch, "sender has " + std::to_string(s.channels) +
                                               " channels, codec expects " +
                                               std::to_string(params.channels));
  }
  if (pair.receiver.shape() != s) {
    throw Error(ErrorCode::kShapeMismatch, "receiver " + ToString(pair.receiver.shape()) +
                                               " vs sender " + ToString(s));
  }
  if (pair.mask.height() != s.height || pair.mask.width() != s.width) {
    throw Error(ErrorCode::kShapeMismatch, "training mask shape");
  }
}

DesignRows BuildDesignRows(const TrainingPair& pair, const CodecParams& params, const Codebook& cb) {
  CheckPair(pair, params);
  const int dim = params.embed_dim;
  DesignRows rows;
  rows.cells = MaskedCells(pair.mask);
  rows.latent = project_cells(pair.sender_pruned, pair.mask, params.encoder);
  rows.indices = quantize_map(rows.latent, cb);
  const ContextMap context = si_context(pair.receiver, params);
  const auto n = static_cast<Eigen::Index>(rows.cells.size());
  rows.inputs.resize(n, params.conditional_inputs());
  rows.targets.resize(n, params.channels);
  const auto sender = pair.sender_pruned.values();
  const std::size_t stride = pair.sender_pruned.channel_stride();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t cell = rows.cells[static_cast<std::size_t>(i)];
    rows.inputs.row(i).segment(0, dim) = cb.codewords().row(rows.indices[static_cast<std::size_t>(i)]);
    rows.inputs.row(i).segment(dim, dim) = context.values.row(static_cast<Eigen::Index>(cell));
    rows.inputs(i, 2 * dim) = 1.0;
    for (int c = 0; c < params.channels; ++c) rows.targets(i, c) = sender[c * stride + cell];
  }
  return rows;
}

}  // namespace internal

namespace {

using internal::Dot;

double UnconditionalDot(const Eigen::MatrixXd& weights, Eigen::Index row, const double* codeword,
                        int dim) {
  double acc = 0.0;
  for (int j = 0; j < dim; ++j) acc += weights(row, j) * codeword[j];
  return acc + weights(row, dim);
}

void RequireFinite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::kNonFinite, what);
}

// Sum of squared residuals plus the ridge penalty on all but the last column.
double RidgeObjective(const LatentMatrix& inputs, const LatentMatrix& targets,
                      const Eigen::MatrixXd& weights, double lambda, bool conditional, int dim) {
  double sse = 0.0;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const double* x = inputs.row(i).data();
    for (Eigen::Index c = 0; c < targets.cols(); ++c) {
      const double pred = conditional ? Dot(weights, c, x, weights.cols())
                                      : UnconditionalDot(weights, c, x, dim);
      const double r = targets(i, c) - pred;
      sse += r * r;
    }
  }
  double penalty = 0.0;
  for (Eigen::Index c = 0; c < weights.rows(); ++c) {
    for (Eigen::Index j = 0; j + 1 < weights.cols(); ++j) penalty += weights(c, j) * weights(c, j);
  }
  return sse + lambda * penalty;
}

Eigen::MatrixXd SolveRidge(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross, double lambda) {
  Eigen::MatrixXd system = gram;
  for (Eigen::Index j = 0; j + 1 < system.rows(); ++j) system(j, j) += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "ridge system could not be factorized");
  }
  Eigen::MatrixXd solution = ldlt.solve(cross);  // inputs x C
  if (!solution.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "ridge solution is singular; increase lambda_ridge");
  }
  return solution.transpose();
}

void CheckCodecAgainstCodebook(const CodecParams& params, const Codebook& cb) {
  if (params.codebook_hash != cb.version_hash()) {
    throw Error(ErrorCode::kCodebookMismatch, "codec params reference a different codebook");
  }
  if (cb.dim() != params.embed_dim) {
    throw Error(ErrorCode::kCodebookMismatch, "codebook dimension differs from the codec's");
  }
}

void CheckMessageAgainstCodec(const Message& msg, const CodecParams& params, const Codebook& cb) {
  const MessageHeader& h = msg.header;
  if (h.codebook_hash != cb.version_hash() || h.codebook_hash != params.codebook_hash) {
    throw Error(ErrorCode::kCodebookMismatch, "message codebook hash differs from the receiver's");
  }
  if (h.codebook_size != cb.size() || h.embed_dim != cb.dim() || h.embed_dim != params.embed_dim) {
    throw Error(ErrorCode::kCodebookMismatch, "message K/D differ from the receiver's codebook");
  }
  if (h.channels != params.channels) {
    throw Error(ErrorCode::kShapeMismatch, "message channel count differs from the codec's");
  }
}

template <typename RowFn>
FeatureMap Reconstruct(const Message& msg, const CodecParams& params, const Codebook& cb,
                       RowFn&& predict_cell) {
  const Shape shape{msg.header.channels, msg.header.height, msg.header.width};
  const IndexMap idx = decode_symbols(msg);
  const LatentMatrix codewords = dequantize(idx, cb);
  const auto cells = internal::MaskedCells(msg.mask);
  std::vector<float> out(shape.size(), 0.0f);
  const std::size_t stride = shape.cells();
  std::vector<double> prediction(static_cast<std::size_t>(params.channels));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    predict_cell(cells[i], codewords.row(static_cast<Eigen::Index>(i)).data(), prediction.data());
    for (int c = 0; c < params.channels; ++c) {
      out[c * stride + cells[i]] = static_cast<float>(prediction[static_cast<std::size_t>(c)]);
    }
  }
  return FeatureMap(shape, std::move(out));
}

}  // namespace

void CodecParams::Validate() const {
  auto fail = [](ErrorCode code, const std::string& what) { throw Error(code, "codec params: " + what); };
  if (channels < 1 || embed_dim < 1) fail(ErrorCode::kInvalidArgument, "dimensions must be >= 1");
  if (channels > 0xFFFF || embed_dim > 0xFFFF) fail(ErrorCode::kInvalidArgument, "dimensions exceed u16");
  if (context_radius < 0) fail(ErrorCode::kInvalidArgument, "context_radius must be >= 0");
  for (const Projection* p : {&encoder, &side_info}) {
    if (p->matrix.rows() != embed_dim || p->matrix.cols() != channels || p->mean.size() != channels) {
      fail(ErrorCode::kShapeMismatch, "projection must be D x C with a C-vector mean");
    }
    if (!p->matrix.allFinite() || !p->mean.allFinite()) fail(ErrorCode::kNonFinite, "projection");
  }
  if (conditional_decoder.rows() != channels || conditional_decoder.cols() != conditional_inputs()) {
    fail(ErrorCode::kShapeMismatch, "conditional decoder must be C x (2D + 1)");
  }
  if (unconditional_decoder.rows() != channels ||
      unconditional_decoder.cols() != unconditional_inputs()) {
    fail(ErrorCode::kShapeMismatch, "unconditional decoder must be C x (D + 1)");
  }
  if (!conditional_decoder.allFinite() || !unconditional_decoder.allFinite()) {
    fail(ErrorCode::kNonFinite, "decoder weights");
  }
  if (!(lambda_ridge >= 0.0) || !(lambda_rec >= 0.0) || !(beta >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "loss weights must be >= 0");
  }
}

Projection fit_encoder_projection(std::span<const FeatureMap> features, int embed_dim) {
  if (embed_dim < 1) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be >= 1");
  if (features.empty()) throw Error(ErrorCode::kInvalidArgument, "no training features");
  const int channels = features.front().channels();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(channels);
  std::size_t n = 0;
  auto for_each_vector = [&](auto&& fn) {
    Eigen::VectorXd v(channels);
    for (const FeatureMap& f : features) {
      if (f.channels() != channels) {
        throw Error(ErrorCode::kShapeMismatch, "training features disagree on channel count");
      }
      const auto values = f.values();
      const std::size_t stride = f.channel_stride();
      for (std::size_t cell = 0; cell < stride; ++cell) {
        bool nonzero = false;
        for (int c = 0; c < channels; ++c) {
          v(c) = values[c * stride + cell];
          nonzero = nonzero || v(c) != 0.0;
        }
        // Zero vectors are pruned or unobserved cells, not data.
        if (nonzero) fn(v);
      }
    }
  };
  for_each_vector([&](const Eigen::VectorXd& v) {
    sum += v;
    ++n;
  });
  if (n < static_cast<std::size_t>(embed_dim) || n == 0) {
    throw Error(ErrorCode::kInvalidArgument, std::to_string(n) + " nonzero cells cannot fit a " +
                                                 std::to_string(embed_dim) + "-d projection");
  }
  Projection out;
  out.mean = sum / static_cast<double>(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(channels, channels);
  for_each_vector([&](const Eigen::VectorXd& v) {
    const Eigen::VectorXd d = v - out.mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(d);
  });
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "covariance eigendecomposition failed");
  }
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  const double top = std::max(values(channels - 1), 0.0);
  const double floor = 1e-12 * std::max(top, 1e-300);
  out.matrix = Eigen::MatrixXd::Zero(embed_dim, channels);
  for (int d = 0; d < std::min(embed_dim, channels); ++d) {
    const int src = channels - 1 - d;
    if (values(src) <= floor) break;
    Eigen::VectorXd dir = eig.eigenvectors().col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index c = 1; c < dir.size(); ++c) {
      if (std::abs(dir(c)) > std::abs(dir(arg))) arg = c;
    }
    if (dir(arg) < 0.0) dir = -dir;
    out.matrix.row(d) = dir.transpose();
  }
  return out;
}

CodecParams make_codec_params(const Projection& projection, const Codebook& cb, int context_radius) {
  CodecParams p;
  p.channels = static_cast<int>(projection.matrix.cols());
  p.embed_dim = static_cast<int>(projection.matrix.rows());
  p.encoder = projection;
  p.side_info = projection;
  p.context_radius = context_radius;
  p.codebook_hash = cb.version_hash();
  p.conditional_decoder = Eigen::MatrixXd::Zero(p.channels, p.conditional_inputs());
  p.unconditional_decoder = Eigen::MatrixXd::Zero(p.channels, p.unconditional_inputs());
  CheckCodecAgainstCodebook(p, cb);
  p.Validate();
  return p;
}

LatentMatrix project_cells(const FeatureMap& f, const Mask& mask, const Projection& projection) {
  if (f.channels() != projection.matrix.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "feature channels differ from the projection's");
  }
  if (mask.height() != f.height() || mask.width() != f.width()) {
    throw Error(ErrorCode::kShapeMismatch, "mask shape differs from the feature map's");
  }
  const auto cells = internal::MaskedCells(mask);
  LatentMatrix out(static_cast<Eigen::Index>(cells.size()), projection.matrix.rows());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    internal::ProjectCell(f, cells[i], projection, out.row(static_cast<Eigen::Index>(i)).data());
  }
  return out;
}

ContextMap si_context(const FeatureMap& local, const CodecParams& params) {
  if (local.channels() != params.channels) {
    throw Error(ErrorCode::kShapeMismatch, "side information has " +
                                               std::to_string(local.channels()) +
                                               " channels, codec expects " +
                                               std::to_string(params.channels));
  }
  const std::vector<double> box = internal::BoxMean(local, params.context_radius);
  const std::size_t cells = local.shape().cells();
  const int channels = params.channels;
  ContextMap ctx{local.height(), local.width(),
                 LatentMatrix(static_cast<Eigen::Index>(cells), params.embed_dim)};
  const Eigen::MatrixXd& proj = params.side_info.matrix;
  const Eigen::VectorXd& mean = params.side_info.mean;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const double* v = box.data() + cell * channels;
    double* dst = ctx.values.row(static_cast<Eigen::Index>(cell)).data();
    for (int d = 0; d < params.embed_dim; ++d) {
      double acc = 0.0;
      for (int c = 0; c < channels; ++c) acc += proj(d, c) * (v[c] - mean(c));
      dst[d] = acc;
    }
  }
  return ctx;
}

DecoderFit fit_conditional_decoder(std::span<const TrainingPair> pairs, const CodecParams& params,
                                   const Codebook& cb, double lambda_ridge) {
  if (!(lambda_ridge >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda_ridge must be >= 0");
  CheckCodecAgainstCodebook(params, cb);
  const int dim = params.embed_dim;
  const int cond_inputs = params.conditional_inputs();

  std::vector<internal::DesignRows> designs;
  designs.reserve(pairs.size());
  std::size_t total = 0;
  for (const TrainingPair& pair : pairs) {
    designs.push_back(internal::BuildDesignRows(pair, params, cb));
    total += designs.back().cells.size();
  }
  if (total < static_cast<std::size_t>(cond_inputs)) {
    throw Error(ErrorCode::kInvalidArgument, std::to_string(total) +
                                                 " training cells cannot fit " +
                                                 std::to_string(cond_inputs) + " decoder inputs");
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(cond_inputs, cond_inputs);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(cond_inputs, params.channels);
  for (const auto& d : designs) {
    if (d.inputs.rows() == 0) continue;
    gram.noalias() += d.inputs.transpose() * d.inputs;
    cross.noalias() += d.inputs.transpose() * d.targets;
  }

  // The unconditional model uses the codeword block and the constant column.
  std::vector<Eigen::Index> keep(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) keep[static_cast<std::size_t>(j)] = j;
  keep.push_back(2 * dim);
  Eigen::MatrixXd gram_u(dim + 1, dim + 1);
  Eigen::MatrixXd cross_u(dim + 1, params.channels);
  for (Eigen::Index a = 0; a <= dim; ++a) {
    for (Eigen::Index b = 0; b <= dim; ++b) gram_u(a, b) = gram(keep[a], keep[b]);
    cross_u.row(a) = cross.row(keep[a]);
  }

  DecoderFit fit;
  fit.cells = total;
  fit.conditional = SolveRidge(gram, cross, lambda_ridge);
  fit.unconditional = SolveRidge(gram_u, cross_u, lambda_ridge);

  auto objective = [&](const Eigen::MatrixXd& w, bool conditional) {
    double sum = 0.0;
    for (const auto& d : designs) sum += RidgeObjective(d.inputs, d.targets, w, 0.0, conditional, dim);
    double penalty = 0.0;
    for (Eigen::Index c = 0; c < w.rows(); ++c) {
      for (Eigen::Index j = 0; j + 1 < w.cols(); ++j) penalty += w(c, j) * w(c, j);
    }
    return sum + lambda_ridge * penalty;
  };
  fit.conditional_objective = objective(fit.conditional, true);
  fit.unconditional_objective = objective(fit.unconditional, false);

  // The unconditional solution padded with zero context weights is a feasible
  // conditional solution with the same objective; keep it if rounding left the
  // solver's answer behind it.
  if (fit.conditional_objective > fit.unconditional_objective) {
    Eigen::MatrixXd embedded = Eigen::MatrixXd::Zero(params.channels, cond_inputs);
    embedded.leftCols(dim) = fit.unconditional.leftCols(dim);
    embedded.col(2 * dim) = fit.unconditional.col(dim);
    fit.conditional = embedded;
    fit.conditional_objective = objective(fit.conditional, true);
  }
  RequireFinite(fit.conditional, "conditional decoder");
  RequireFinite(fit.unconditional, "unconditional decoder");
  return fit;
}

Message encode_message(const FeatureMap& pruned, const Mask& mask, const CodecParams& params,
                       const Codebook& cb) {
  params.Validate();
  CheckCodecAgainstCodebook(params, cb);
  if (pruned.channels() != params.channels) {
    throw Error(ErrorCode::kShapeMismatch, "feature channels differ from the codec's");
  }
  const LatentMatrix latent = project_cells(pruned, mask, params.encoder);
  const IndexMap idx = quantize_map(latent, cb);
  MessageHeader header;
  header.channels = static_cast<std::uint16_t>(pruned.channels());
  header.height = static_cast<std::uint16_t>(pruned.height());
  header.width = static_cast<std::uint16_t>(pruned.width());
  header.embed_dim = static_cast<std::uint16_t>(cb.dim());
  header.codebook_size = static_cast<std::uint16_t>(cb.size());
  header.precision = kDefaultPrecision;
  header.codebook_hash = cb.version_hash();
  return make_message(header, mask, idx);
}

FeatureMap decode_message(const Message& msg, const FeatureMap& local, const CodecParams& params,
                          const Codebook& cb) {
  params.Validate();
  CheckMessageAgainstCodec(msg, params, cb);
  const Shape shape{msg.header.channels, msg.header.height, msg.header.width};
  if (local.shape() != shape) {
    throw Error(ErrorCode::kShapeMismatch, "side information " + ToString(local.shape()) +
                                               " vs message " + ToString(shape));
  }
  const ContextMap context = si_context(local, params);
  const int dim = params.embed_dim;
  std::vector<double> input(static_cast<std::size_t>(params.conditional_inputs()));
  return Reconstruct(msg, params, cb, [&](std::size_t cell, const double* codeword, double* out) {
    std::copy(codeword, codeword + dim, input.begin());
    const double* ctx = context.values.row(static_cast<Eigen::Index>(cell)).data();
    std::copy(ctx, ctx + dim, input.begin() + dim);
    input[2 * static_cast<std::size_t>(dim)] = 1.0;
    for (int c = 0; c < params.channels; ++c) {
      out[c] = Dot(params.conditional_decoder, c, input.data(), params.conditional_inputs());
    }
  });
}

FeatureMap decode_message(std::span<const std::uint8_t> bytes, const FeatureMap& local,
                          const CodecParams& params, const Codebook& cb) {
  return decode_message(ParseMessage(bytes), local, params, cb);
}

FeatureMap decode_unconditional(const Message& msg, const CodecParams& params, const Codebook& cb) {
  params.Validate();
  CheckMessageAgainstCodec(msg, params, cb);
  const int dim = params.embed_dim;
  return Reconstruct(msg, params, cb, [&](std::size_t, const double* codeword, double* out) {
    for (int c = 0; c < params.channels; ++c) {
      out[c] = UnconditionalDot(params.unconditional_decoder, c, codeword, dim);
    }
  });
}

FeatureMap decode_unconditional(std::span<const std::uint8_t> bytes, const CodecParams& params,
                                const Codebook& cb) {
  return decode_unconditional(ParseMessage(bytes), params, cb);
}

namespace {

constexpr std::uint8_t kParamsVersion = 1;

void WriteMatrix(ByteWriter& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.F64(m(r, c));
  }
}

Eigen::MatrixXd ReadMatrix(ByteReader& r, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r.F64();
  }
  return m;
}

}  // namespace

std::vector<std::uint8_t> SerializeCodecParams(const CodecParams& params) {
  params.Validate();
  ByteWriter w;
  w.Tag("DSCP");
  w.U8(kParamsVersion);
  w.U16(static_cast<std::uint16_t>(params.channels));
  w.U16(static_cast<std::uint16_t>(params.embed_dim));
  w.U16(static_cast<std::uint16_t>(params.context_radius));
  w.U64(params.codebook_hash);
  w.F64(params.lambda_ridge);
  w.F64(params.lambda_rec);
  w.F64(params.beta);
  WriteMatrix(w, params.encoder.matrix);
  WriteMatrix(w, params.encoder.mean);
  WriteMatrix(w, params.side_info.matrix);
  WriteMatrix(w, params.side_info.mean);
  WriteMatrix(w, params.conditional_decoder);
  WriteMatrix(w, params.unconditional_decoder);
  return w.Take();
}

CodecParams ParseCodecParams(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectTag("DSCP");
  if (r.U8() != kParamsVersion) throw Error(ErrorCode::kParse, "unsupported DSCP version");
  CodecParams p;
  p.channels = r.U16();
  p.embed_dim = r.U16();
  p.context_radius = r.U16();
  if (p.channels == 0 || p.embed_dim == 0) throw Error(ErrorCode::kParse, "DSCP with zero dimension");
  p.codebook_hash = r.U64();
  p.lambda_ridge = r.F64();
  p.lambda_rec = r.F64();
  p.beta = r.F64();
  p.encoder.matrix = ReadMatrix(r, p.embed_dim, p.channels);
  p.encoder.mean = ReadMatrix(r, p.channels, 1);
  p.side_info.matrix = ReadMatrix(r, p.embed_dim, p.channels);
  p.side_info.mean = ReadMatrix(r, p.channels, 1);
  p.conditional_decoder = ReadMatrix(r, p.channels, p.conditional_inputs());
  p.unconditional_decoder = ReadMatrix(r, p.channels, p.unconditional_inputs());
  r.ExpectEnd();
  try {
    p.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return p;
}

void WriteCodecParams(const std::string& path, const CodecParams& params) {
  WriteFileBytes(path, SerializeCodecParams(params));
}

CodecParams ReadCodecParams(const std::string& path) {
  return ParseCodecParams(ReadFileBytes(path));
}

}  // namespace dsc
