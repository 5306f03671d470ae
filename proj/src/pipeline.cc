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

#include "dsc/pipeline.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include "dsc/byte_io.h"
#include "dsc/error.h"
#include "dsc/message.h"
#include "dsc/pruning.h"
#include "dsc/rng.h"

namespace dsc {
namespace {

constexpr std::uint64_t kTrainTag = 0x7261696e;
constexpr std::uint64_t kEvalTag = 0x6576616c;
constexpr std::uint64_t kPoseTag = 0x706f7365;
constexpr std::uint64_t kSubsampleTag = 0x73756273;
constexpr std::uint64_t kKMeansTag = 0x6b6d6e73;

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double ParseDouble(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw Error(ErrorCode::kParse, "bad number for " + key + ": '" + v + "'");
  }
  return d;
}

long long ParseInt(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
    throw Error(ErrorCode::kParse, "bad integer for " + key + ": '" + v + "'");
  }
  return i;
}

int ParseSmallInt(const std::string& key, const std::string& v) {
  const long long i = ParseInt(key, v);
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::kParse, key + " out of range");
  }
  return static_cast<int>(i);
}

std::uint64_t ParseU64(const std::string& key, const std::string& v) {
  if (v.empty() || v[0] == '-') throw Error(ErrorCode::kParse, "bad unsigned for " + key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE) {
    throw Error(ErrorCode::kParse, "bad unsigned for " + key + ": '" + v + "'");
  }
  return u;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::kParse, "bad boolean for " + key + ": '" + v + "'");
}

std::string Num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string Knob(double v) { return Num(v, 9); }
std::string Metric(double v) { return Num(v, 17); }

// Deterministic subset of `n` row indices of size min(n, cap), sorted.
std::vector<Eigen::Index> SubsampleRows(Eigen::Index n, Eigen::Index cap, std::uint64_t seed) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  if (n <= cap) return rows;
  Rng rng(seed);
  for (Eigen::Index i = 0; i < cap; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.Index(static_cast<std::uint64_t>(n - i)));
    std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
  }
  rows.resize(static_cast<std::size_t>(cap));
  std::sort(rows.begin(), rows.end());
  return rows;
}

FeatureMap ZeroLike(const Shape& shape) { return FeatureMap(shape); }

}  // namespace

void ExperimentConfig::Validate() const {
  scenario.Validate();
  if (!(knobs.tau >= 0.0 && knobs.tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be in [0, 1]");
  }
  if (knobs.codebook_size < 1 || knobs.codebook_size > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "codebook_size must be in [1, 65535]");
  }
  if (knobs.embed_dim < 1) throw Error(ErrorCode::kInvalidArgument, "embed_dim must be >= 1");
  if (context_radius < 0) throw Error(ErrorCode::kInvalidArgument, "context_radius must be >= 0");
  if (!(lambda_ridge > 0.0) || !std::isfinite(lambda_ridge)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda_ridge must be positive");
  }
  if (!(lambda_rec >= 0.0) || !(beta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda_rec and beta must be non-negative");
  }
  if (kmeans_iters < 1 || kmeans_max_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans_iters and kmeans_max_samples must be >= 1");
  }
  if (!(train_tau >= 0.0 && train_tau <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train_tau must be in [0, 1]");
  }
  if (train_scenes < 1 || eval_scenes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "train_scenes and eval_scenes must be >= 1");
  }
  if (time_index < 0) throw Error(ErrorCode::kInvalidArgument, "time_index must be >= 0");
  if (scenario.num_agents < 2) {
    throw Error(ErrorCode::kInvalidArgument, "links need at least two agents");
  }
}

ExperimentConfig ParseExperimentConfig(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = Trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = Trim(std::string_view(body).substr(0, eq));
    const std::string v = Trim(std::string_view(body).substr(eq + 1));
    ScenarioConfig& s = cfg.scenario;
    if (key == "num_agents") s.num_agents = ParseSmallInt(key, v);
    else if (key == "channels") s.channels = ParseSmallInt(key, v);
    else if (key == "height") s.height = ParseSmallInt(key, v);
    else if (key == "width") s.width = ParseSmallInt(key, v);
    else if (key == "rho") s.rho = ParseDouble(key, v);
    else if (key == "obs_noise") s.obs_noise = ParseDouble(key, v);
    else if (key == "visibility_overlap") s.visibility_overlap = ParseDouble(key, v);
    else if (key == "temporal_persistence") s.temporal_persistence = ParseDouble(key, v);
    else if (key == "smoothing_radius") s.smoothing_radius = ParseSmallInt(key, v);
    else if (key == "seed") s.seed = ParseU64(key, v);
    else if (key == "tau") cfg.knobs.tau = ParseDouble(key, v);
    else if (key == "codebook_size") cfg.knobs.codebook_size = ParseSmallInt(key, v);
    else if (key == "embed_dim") cfg.knobs.embed_dim = ParseSmallInt(key, v);
    else if (key == "context_radius") cfg.context_radius = ParseSmallInt(key, v);
    else if (key == "lambda_ridge") cfg.lambda_ridge = ParseDouble(key, v);
    else if (key == "lambda_rec") cfg.lambda_rec = ParseDouble(key, v);
    else if (key == "beta") cfg.beta = ParseDouble(key, v);
    else if (key == "kmeans_iters") cfg.kmeans_iters = ParseSmallInt(key, v);
    else if (key == "kmeans_max_samples") cfg.kmeans_max_samples = ParseSmallInt(key, v);
    else if (key == "train_tau") cfg.train_tau = ParseDouble(key, v);
    else if (key == "train_scenes") cfg.train_scenes = ParseSmallInt(key, v);
    else if (key == "eval_scenes") cfg.eval_scenes = ParseSmallInt(key, v);
    else if (key == "time_index") cfg.time_index = ParseSmallInt(key, v);
    else if (key == "budget_bytes") cfg.budget_bytes = ParseU64(key, v);
    else if (key == "enforce_budget") cfg.enforce_budget = ParseBool(key, v);
    else throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.Validate();
  return cfg;
}

std::string FormatExperimentConfig(const ExperimentConfig& cfg) {
  const ScenarioConfig& s = cfg.scenario;
  std::ostringstream o;
  o << "num_agents = " << s.num_agents << "\n"
    << "channels = " << s.channels << "\n"
    << "height = " << s.height << "\n"
    << "width = " << s.width << "\n"
    << "rho = " << Metric(s.rho) << "\n"
    << "obs_noise = " << Metric(s.obs_noise) << "\n"
    << "visibility_overlap = " << Metric(s.visibility_overlap) << "\n"
    << "temporal_persistence = " << Metric(s.temporal_persistence) << "\n"
    << "smoothing_radius = " << s.smoothing_radius << "\n"
    << "seed = " << s.seed << "\n"
    << "tau = " << Metric(cfg.knobs.tau) << "\n"
    << "codebook_size = " << cfg.knobs.codebook_size << "\n"
    << "embed_dim = " << cfg.knobs.embed_dim << "\n"
    << "context_radius = " << cfg.context_radius << "\n"
    << "lambda_ridge = " << Metric(cfg.lambda_ridge) << "\n"
    << "lambda_rec = " << Metric(cfg.lambda_rec) << "\n"
    << "beta = " << Metric(cfg.beta) << "\n"
    << "kmeans_iters = " << cfg.kmeans_iters << "\n"
    << "kmeans_max_samples = " << cfg.kmeans_max_samples << "\n"
    << "train_tau = " << Metric(cfg.train_tau) << "\n"
    << "train_scenes = " << cfg.train_scenes << "\n"
    << "eval_scenes = " << cfg.eval_scenes << "\n"
    << "time_index = " << cfg.time_index << "\n"
    << "budget_bytes = " << cfg.budget_bytes << "\n"
    << "enforce_budget = " << (cfg.enforce_budget ? "true" : "false") << "\n";
  return o.str();
}

ExperimentConfig ReadExperimentConfig(const std::string& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  return ParseExperimentConfig(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

ScenarioConfig train_scenario(const ExperimentConfig& cfg, int scene_index) {
  ScenarioConfig s = cfg.scenario;
  s.seed = MixSeed({cfg.scenario.seed, kTrainTag, static_cast<std::uint64_t>(scene_index)});
  return s;
}

ScenarioConfig eval_scenario(const ExperimentConfig& cfg, int scene_index) {
  ScenarioConfig s = cfg.scenario;
  s.seed = MixSeed({cfg.scenario.seed, kEvalTag, static_cast<std::uint64_t>(scene_index)});
  return s;
}

Episode::Episode(const ScenarioConfig& cfg, int t_max)
    : cfg_(cfg), scenes_(generate_scene_sequence(cfg, t_max)) {}

const Scene& Episode::scene(int t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= scenes_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "time index " + std::to_string(t) + " not generated");
  }
  return scenes_[static_cast<std::size_t>(t)];
}

FeatureMap Episode::observe(int agent_id, int t) const { return dsc::observe(scene(t), agent_id, cfg_); }

CodecBundle fit_codec(const ExperimentConfig& cfg, const CodecKnobs& knobs) {
  cfg.Validate();
  const int agents = cfg.scenario.num_agents;
  // One directed pair per training scene, rotating through the agents.
  std::vector<TrainingPair> pairs;
  std::vector<FeatureMap> senders;
  pairs.reserve(static_cast<std::size_t>(cfg.train_scenes));
  for (int s = 0; s < cfg.train_scenes; ++s) {
    const ScenarioConfig sc = train_scenario(cfg, s);
    const Scene scene = generate_scene_sequence(sc, cfg.time_index).back();
    const int sender = s % agents;
    const int receiver = (s + 1) % agents;
    PrunedFeature pruned = prune(observe(scene, sender, sc), cfg.train_tau);
    senders.push_back(pruned.feature);
    pairs.push_back({std::move(pruned.feature), std::move(pruned.mask), observe(scene, receiver, sc)});
  }

  const Projection projection = fit_encoder_projection(senders, knobs.embed_dim);

  Eigen::Index total = 0;
  std::vector<LatentMatrix> latents;
  for (const TrainingPair& p : pairs) {
    latents.push_back(project_cells(p.sender_pruned, p.mask, projection));
    total += latents.back().rows();
  }
  LatentMatrix pooled(total, knobs.embed_dim);
  Eigen::Index row = 0;
  for (const LatentMatrix& l : latents) {
    pooled.middleRows(row, l.rows()) = l;
    row += l.rows();
  }
  const std::vector<Eigen::Index> keep =
      SubsampleRows(total, cfg.kmeans_max_samples, MixSeed({cfg.scenario.seed, kSubsampleTag}));
  LatentMatrix samples(static_cast<Eigen::Index>(keep.size()), knobs.embed_dim);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    samples.row(static_cast<Eigen::Index>(i)) = pooled.row(keep[i]);
  }
  Codebook cb = train_codebook(samples, knobs.codebook_size, cfg.kmeans_iters,
                               MixSeed({cfg.scenario.seed, kKMeansTag}));

  CodecParams params = make_codec_params(projection, cb, cfg.context_radius);
  params.lambda_ridge = cfg.lambda_ridge;
  params.lambda_rec = cfg.lambda_rec;
  params.beta = cfg.beta;
  DecoderFit fit = fit_conditional_decoder(pairs, params, cb, cfg.lambda_ridge);
  params.conditional_decoder = fit.conditional;
  params.unconditional_decoder = fit.unconditional;
  return CodecBundle{std::move(params), std::move(cb), std::move(fit)};
}

LinkResult run_link(const ExperimentConfig& cfg, const Episode& episode, int t, int sender,
                    int receiver, const CodecBundle& codec, const Perturbation& perturbation,
                    DecoderMode mode) {
  const int agents = episode.config().num_agents;
  if (sender < 0 || sender >= agents || receiver < 0 || receiver >= agents || sender == receiver) {
    throw Error(ErrorCode::kInvalidArgument, "bad link " + std::to_string(sender) + "->" +
                                                 std::to_string(receiver));
  }
  if (perturbation.delay < 0 || perturbation.delay > t) {
    throw Error(ErrorCode::kInvalidArgument, "delay must be in [0, t]");
  }
  if (!(perturbation.sigma_pose >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sigma_pose must be non-negative");
  }

  const FeatureMap local = episode.observe(receiver, t);
  const FeatureMap truth = episode.observe(sender, t);
  FeatureMap sent = perturbation.delay == 0 ? truth : episode.observe(sender, t - perturbation.delay);
  if (perturbation.sigma_pose > 0.0) {
    const std::uint64_t seed = MixSeed({episode.config().seed, kPoseTag, static_cast<std::uint64_t>(sender),
                                        static_cast<std::uint64_t>(receiver), static_cast<std::uint64_t>(t)});
    sent = perturb_pose(sent, perturbation.sigma_pose, seed);
  }
  const PrunedFeature pruned = prune(sent, cfg.knobs.tau);

  LinkResult r;
  r.sender = sender;
  r.receiver = receiver;
  r.budget_bytes = cfg.budget_bytes;
  r.occupancy = occupancy(pruned.mask);

  FeatureMap recon;
  if (mode == DecoderMode::kIdentity) {
    r.payload_bytes = static_cast<std::size_t>(raw_payload_bytes(
        static_cast<std::uint64_t>(pruned.feature.channels()),
        static_cast<std::uint64_t>(pruned.feature.height()),
        static_cast<std::uint64_t>(pruned.feature.width()), 32));
    recon = pruned.feature;
  } else {
    const Message msg = encode_message(pruned.feature, pruned.mask, codec.params, codec.codebook);
    const std::vector<std::uint8_t> bytes = SerializeMessage(msg);
    r.payload_bytes = bytes.size();
    try {
      recon = mode == DecoderMode::kConditional
                  ? decode_message(bytes, local, codec.params, codec.codebook)
                  : decode_unconditional(bytes, codec.params, codec.codebook);
    } catch (const Error&) {
      r.failed = true;
    }
  }
  r.within_budget = cfg.budget_bytes == 0 || r.payload_bytes <= cfg.budget_bytes;
  r.dropped = cfg.enforce_budget && !r.within_budget;
  r.reconstruction = r.delivered() ? std::move(recon) : ZeroLike(local.shape());

  r.recon_mse = mse(r.reconstruction, pruned.feature);
  const FeatureMap oracle = elementwise_max(local, truth);
  const FeatureMap fused = r.delivered() ? elementwise_max(local, r.reconstruction) : local;
  r.fusion_mse = mse(fused, oracle);
  return r;
}

FeatureMap fuse_all(const FeatureMap& local, std::span<const FeatureMap> reconstructions) {
  FeatureMap fused = local;
  for (const FeatureMap& f : reconstructions) fused = elementwise_max(fused, f);
  return fused;
}

ReceiverResult run_receiver(const ExperimentConfig& cfg, const Episode& episode, int t,
                            int receiver, const CodecBundle& codec,
                            const Perturbation& perturbation, DecoderMode mode) {
  ReceiverResult out;
  std::vector<FeatureMap> delivered;
  for (int j = 0; j < episode.config().num_agents; ++j) {
    if (j == receiver) continue;
    out.links.push_back(run_link(cfg, episode, t, j, receiver, codec, perturbation, mode));
    if (out.links.back().delivered()) delivered.push_back(out.links.back().reconstruction);
  }
  out.fused = fuse_all(episode.observe(receiver, t), delivered);
  return out;
}

RDPoint evaluate_point(const ExperimentConfig& cfg, const CodecBundle& codec,
                       const CodecKnobs& knobs, const Perturbation& perturbation,
                       DecoderMode mode, int scenes) {
  if (scenes < 1) throw Error(ErrorCode::kInvalidArgument, "scenes must be >= 1");
  ExperimentConfig run = cfg;
  run.knobs = knobs;
  run.Validate();

  RDPoint p;
  p.knobs = knobs;
  p.rho = cfg.scenario.rho;
  p.perturbation = perturbation;
  p.conditional = mode == DecoderMode::kConditional;
  p.scenes = scenes;
  p.seed = cfg.scenario.seed;
  double payload = 0.0;
  double recon = 0.0;
  double fusion = 0.0;
  double occ = 0.0;
  for (int s = 0; s < scenes; ++s) {
    const Episode episode(eval_scenario(cfg, s), cfg.time_index);
    for (int i = 0; i < cfg.scenario.num_agents; ++i) {
      for (int j = 0; j < cfg.scenario.num_agents; ++j) {
        if (i == j) continue;
        const LinkResult r = run_link(run, episode, cfg.time_index, j, i, codec, perturbation, mode);
        payload += static_cast<double>(r.payload_bytes);
        recon += r.recon_mse;
        fusion += r.fusion_mse;
        occ += r.occupancy;
        ++p.links;
      }
    }
  }
  const double n = static_cast<double>(p.links);
  p.payload_bytes = payload / n;
  p.recon_mse = recon / n;
  p.fusion_mse = fusion / n;
  p.occupancy = occ / n;
  return p;
}

std::vector<RDPoint> rd_sweep(const ExperimentConfig& cfg, const SweepGrid& grid, int scenes) {
  if (grid.taus.empty() || grid.codebook_sizes.empty() || grid.embed_dims.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep grid has an empty axis");
  }
  std::vector<int> ks = grid.codebook_sizes;
  std::vector<int> ds = grid.embed_dims;
  std::vector<double> taus = grid.taus;
  std::sort(ks.begin(), ks.end());
  std::sort(ds.begin(), ds.end());
  std::sort(taus.begin(), taus.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  std::vector<RDPoint> points;
  for (int k : ks) {
    for (int d : ds) {
      const CodecBundle codec = fit_codec(cfg, CodecKnobs{cfg.knobs.tau, k, d});
      for (double tau : taus) {
        points.push_back(evaluate_point(cfg, codec, CodecKnobs{tau, k, d}, Perturbation{},
                                        DecoderMode::kConditional, scenes));
      }
    }
  }
  return points;
}

std::vector<RobustnessRow> robustness_sweep(const ExperimentConfig& cfg,
                                            std::span<const double> sigmas,
                                            std::span<const int> delays, int scenes) {
  if (sigmas.empty() || delays.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "robustness grid has an empty axis");
  }
  std::vector<double> ss(sigmas.begin(), sigmas.end());
  std::vector<int> dd(delays.begin(), delays.end());
  std::sort(ss.begin(), ss.end());
  std::sort(dd.begin(), dd.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  dd.erase(std::unique(dd.begin(), dd.end()), dd.end());

  const CodecBundle codec = fit_codec(cfg, cfg.knobs);
  std::vector<RobustnessRow> rows;
  for (double sigma : ss) {
    for (int delay : dd) {
      const Perturbation pert{sigma, delay};
      rows.push_back({evaluate_point(cfg, codec, cfg.knobs, pert, DecoderMode::kConditional, scenes),
                      evaluate_point(cfg, codec, cfg.knobs, pert, DecoderMode::kUnconditional, scenes)});
    }
  }
  return rows;
}

std::string FormatRdRow(const RDPoint& p) {
  std::string row;
  row += Knob(p.knobs.tau) + ",";
  row += std::to_string(p.knobs.codebook_size) + ",";
  row += std::to_string(p.knobs.embed_dim) + ",";
  row += Knob(p.rho) + ",";
  row += Knob(p.perturbation.sigma_pose) + ",";
  row += std::to_string(p.perturbation.delay) + ",";
  row += Metric(p.payload_bytes) + ",";
  row += Metric(p.recon_mse) + ",";
  row += Metric(p.fusion_mse) + ",";
  row += p.conditional ? "1," : "0,";
  row += std::to_string(p.seed) + ",";
  row += std::to_string(p.scenes);
  return row;
}

void WriteRdCsv(std::ostream& out, std::span<const RDPoint> points) {
  out << kRdCsvHeader << "\n";
  for (const RDPoint& p : points) out << FormatRdRow(p) << "\n";
}

void WriteRobustnessCsv(std::ostream& out, std::span<const RobustnessRow> rows) {
  out << kRdCsvHeader << kRobustnessCsvExtra << "\n";
  for (const RobustnessRow& r : rows) {
    out << FormatRdRow(r.conditional) << "," << Metric(r.unconditional.recon_mse) << ","
        << Metric(r.unconditional.fusion_mse) << ","
        << Metric(r.unconditional.recon_mse - r.conditional.recon_mse) << "\n";
  }
}

}  // namespace dsc
