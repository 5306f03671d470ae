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

#include "dsc/cli.h"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsc/byte_io.h"
#include "dsc/codec.h"
#include "dsc/error.h"
#include "dsc/message.h"
#include "dsc/pipeline.h"
#include "dsc/pruning.h"
#include "dsc/source_sim.h"
#include "dsc/vq.h"

namespace dsc {
namespace {

namespace fs = std::filesystem;

constexpr const char* kParamsFile = "codec.dscp";
constexpr const char* kCodebookFile = "codebook.cdbk";

struct GlobalFlags {
  std::string scenario;
  std::string seed;
  double tau = -1.0;
  int codebook_size = 0;
  int embed_dim = 0;
  std::uint64_t budget = 0;
  bool enforce_budget = false;
  std::string out;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* d_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
};

std::uint64_t ParseSeed(const std::string& text, const char* origin) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] != '-') v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad seed from ") + origin + ": '" + text + "'");
  }
  return v;
}

// Scenario file, then DSC_SEED, then explicit flags.
ExperimentConfig ResolveConfig(const GlobalFlags& g) {
  ExperimentConfig cfg = g.scenario.empty() ? ExperimentConfig{} : ReadExperimentConfig(g.scenario);
  if (g.seed_opt->count() > 0) {
    cfg.scenario.seed = ParseSeed(g.seed, "--seed");
  } else if (const char* env = std::getenv("DSC_SEED"); env != nullptr && *env != '\0') {
    cfg.scenario.seed = ParseSeed(env, "DSC_SEED");
  }
  if (g.tau_opt->count() > 0) cfg.knobs.tau = g.tau;
  if (g.k_opt->count() > 0) cfg.knobs.codebook_size = g.codebook_size;
  if (g.d_opt->count() > 0) cfg.knobs.embed_dim = g.embed_dim;
  if (g.budget_opt->count() > 0) cfg.budget_bytes = g.budget;
  if (g.enforce_budget) cfg.enforce_budget = true;
  cfg.Validate();
  return cfg;
}

const std::string& RequireOut(const GlobalFlags& g) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  return g.out;
}

void WriteText(const std::string& path, const std::string& text) {
  WriteFileBytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

// CSV goes to --out when given, else to stdout.
void EmitCsv(const GlobalFlags& g, const std::string& csv, std::ostream& out) {
  if (g.out.empty()) {
    out << csv;
  } else {
    WriteText(g.out, csv);
  }
}

struct LoadedCodec {
  CodecParams params;
  Codebook codebook;
};

LoadedCodec LoadCodec(const std::string& dir) {
  return {ReadCodecParams((fs::path(dir) / kParamsFile).string()),
          ReadCodebook((fs::path(dir) / kCodebookFile).string())};
}

void MakeDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + dir + ": " + ec.message());
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Side-information-aware feature codec: simulate, fit, encode, decode, sweep.", "dsc"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--scenario", g.scenario, "Experiment config file (key = value lines)");
  g.seed_opt = app.add_option("--seed", g.seed, "Base seed (falls back to DSC_SEED, then the config)");
  g.tau_opt = app.add_option("--tau", g.tau, "Pruning threshold in [0, 1]");
  g.k_opt = app.add_option("--codebook-size", g.codebook_size, "Codebook size K");
  g.d_opt = app.add_option("--embed-dim", g.embed_dim, "Embedding dimension D");
  g.budget_opt = app.add_option("--budget", g.budget, "Per-message budget in bytes (0 = none)");
  app.add_flag("--enforce-budget", g.enforce_budget, "Drop links whose message exceeds the budget");
  app.add_option("--out", g.out, "Output file or directory");

  int time_index = -1;
  auto* gen = app.add_subcommand("gen", "Write per-agent feature fixtures and the resolved config");
  gen->add_option("--time", time_index, "Frame to observe (default: config time_index)");

  auto* fit = app.add_subcommand("fit", "Fit projection, codebook and decoders; write a codec directory");

  std::string codec_dir, input, local;
  auto* encode = app.add_subcommand("encode", "Prune and encode a sender feature file into a message");
  encode->add_option("--codec", codec_dir, "Codec directory from `fit`")->required();
  encode->add_option("--input", input, "Sender feature map (.fmap)")->required();

  auto* decode = app.add_subcommand("decode", "Decode a message into a feature map");
  decode->add_option("--codec", codec_dir, "Codec directory from `fit`")->required();
  decode->add_option("--input", input, "Message file")->required();
  decode->add_option("--local", local, "Receiver feature map; omit for the context-free decoder");

  std::vector<double> taus = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<int> ks, ds;
  int scenes = 0;
  auto* sweep_rd = app.add_subcommand("sweep-rd", "Rate-distortion sweep over tau, K and D");
  sweep_rd->add_option("--taus", taus, "Comma-separated tau grid")->delimiter(',');
  sweep_rd->add_option("--ks", ks, "Comma-separated codebook sizes (default: --codebook-size)")->delimiter(',');
  sweep_rd->add_option("--ds", ds, "Comma-separated embedding dims (default: --embed-dim)")->delimiter(',');
  sweep_rd->add_option("--scenes", scenes, "Evaluation scenes per point (default: config)");

  std::vector<double> sigmas = {0.0, 1.0, 2.0, 4.0};
  std::vector<int> delays = {0, 1, 2, 4};
  auto* sweep_robust = app.add_subcommand("sweep-robust", "Pose-noise x delay sweep at fixed knobs");
  sweep_robust->add_option("--sigmas", sigmas, "Comma-separated pose noise levels (cells)")->delimiter(',');
  sweep_robust->add_option("--delays", delays, "Comma-separated delays (frames)")->delimiter(',');
  sweep_robust->add_option("--scenes", scenes, "Evaluation scenes per row (default: config)");

  auto* report = app.add_subcommand("report", "Per-link CSV for the evaluation scenes at fixed knobs");
  report->add_option("--scenes", scenes, "Evaluation scenes (default: config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code;
  }

  try {
    const ExperimentConfig cfg = ResolveConfig(g);
    const int eval_scenes = scenes > 0 ? scenes : cfg.eval_scenes;
    if (*gen) {
      const std::string& dir = RequireOut(g);
      MakeDir(dir);
      const int t = time_index >= 0 ? time_index : cfg.time_index;
      const Scene scene = generate_scene(cfg.scenario, t);
      for (int a = 0; a < cfg.scenario.num_agents; ++a) {
        WriteFeatureMap((fs::path(dir) / ("agent" + std::to_string(a) + ".fmap")).string(),
                        observe(scene, a, cfg.scenario));
      }
      WriteText((fs::path(dir) / "scenario.cfg").string(), FormatExperimentConfig(cfg));
    } else if (*fit) {
      const std::string& dir = RequireOut(g);
      MakeDir(dir);
      const CodecBundle bundle = fit_codec(cfg, cfg.knobs);
      WriteCodecParams((fs::path(dir) / kParamsFile).string(), bundle.params);
      WriteCodebook((fs::path(dir) / kCodebookFile).string(), bundle.codebook);
      out << "cells=" << bundle.fit.cells
          << " conditional_objective=" << Num(bundle.fit.conditional_objective)
          << " unconditional_objective=" << Num(bundle.fit.unconditional_objective) << "\n";
    } else if (*encode) {
      const LoadedCodec codec = LoadCodec(codec_dir);
      const PrunedFeature pruned = prune(ReadFeatureMap(input), cfg.knobs.tau);
      const std::vector<std::uint8_t> bytes =
          SerializeMessage(encode_message(pruned.feature, pruned.mask, codec.params, codec.codebook));
      WriteFileBytes(RequireOut(g), bytes);
      out << "payload_bytes=" << bytes.size() << " symbols=" << pruned.mask.count();
      if (cfg.budget_bytes > 0) {
        out << " within_budget=" << (bytes.size() <= cfg.budget_bytes ? 1 : 0);
      }
      out << "\n";
    } else if (*decode) {
      const LoadedCodec codec = LoadCodec(codec_dir);
      const std::vector<std::uint8_t> bytes = ReadFileBytes(input);
      const FeatureMap recon = local.empty()
                                   ? decode_unconditional(bytes, codec.params, codec.codebook)
                                   : decode_message(bytes, ReadFeatureMap(local), codec.params, codec.codebook);
      WriteFeatureMap(RequireOut(g), recon);
    } else if (*sweep_rd) {
      SweepGrid grid{taus, ks.empty() ? std::vector<int>{cfg.knobs.codebook_size} : ks,
                     ds.empty() ? std::vector<int>{cfg.knobs.embed_dim} : ds};
      std::ostringstream csv;
      WriteRdCsv(csv, rd_sweep(cfg, grid, eval_scenes));
      EmitCsv(g, csv.str(), out);
    } else if (*sweep_robust) {
      std::ostringstream csv;
      WriteRobustnessCsv(csv, robustness_sweep(cfg, sigmas, delays, eval_scenes));
      EmitCsv(g, csv.str(), out);
    } else if (*report) {
      const CodecBundle codec = fit_codec(cfg, cfg.knobs);
      std::ostringstream csv;
      csv << kLinkCsvHeader << "\n";
      for (int s = 0; s < eval_scenes; ++s) {
        const Episode episode(eval_scenario(cfg, s), cfg.time_index);
        for (int i = 0; i < cfg.scenario.num_agents; ++i) {
          const ReceiverResult rr = run_receiver(cfg, episode, cfg.time_index, i, codec, {});
          for (const LinkResult& r : rr.links) {
            csv << s << "," << r.sender << "," << r.receiver << "," << r.payload_bytes << ","
                << r.budget_bytes << "," << (r.within_budget ? 1 : 0) << ","
                << (r.delivered() ? 1 : 0) << "," << Num(r.recon_mse) << "," << Num(r.fusion_mse)
                << "\n";
          }
        }
      }
      EmitCsv(g, csv.str(), out);
    }
  } catch (const Error& e) {
    err << "dsc: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "dsc: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dsc
