// Copyright (C) 2026 The recimatch Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.


#include "cli/commands.h"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/bench.h"
#include "cli/manifest.h"
#include "cli/scene_json.h"
#include "json.hpp"
#include "recimatch/basins.h"
#include "recimatch/coarse2fine.h"
#include "recimatch/error.h"
#include "recimatch/grid_io.h"
#include "recimatch/losses.h"
#include "recimatch/matcher.h"
#include "recimatch/synth.h"

namespace recimatch::cli {
namespace {

namespace fs = std::filesystem;

struct MatchArgs {
  std::string d1, d2, mode = "fast", out, stats;
  std::size_t k = kDefaultSeedCount;
  std::size_t max_iters = kDefaultMaxIterations;
};

struct C2fArgs {
  std::string manifest, out;
  std::size_t k = kDefaultSeedCount;
  std::size_t max_iters = kDefaultMaxIterations;
  double coverage = kDefaultCoverage;
};

struct BasinArgs {
  std::string d1, d2, out_labels, out_pgm;
};

struct BenchArgs {
  std::string scene, k_list = "3000", modes = "fast", out;
  std::size_t repeat = 1;
  std::size_t max_iters = kDefaultMaxIterations;
};

struct LossArgs {
  std::string pred, gt, conf, d1, d2, pairs;
  LossConfig config;
};

struct SynthArgs {
  std::string scene, out_dir;
  bool random = false;
  std::uint32_t height = 64, width = 64, dim = 24;
  std::uint64_t seed = 0;
};

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

std::vector<std::string> SplitCsv(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::size_t ParseCount(const std::string& text, const char* what) {
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text[0] == '-') {
    throw Error(ErrorCode::kParse, std::string("bad ") + what + " value '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

int RunMatch(const MatchArgs& a) {
  const DescriptorGrid d1 = LoadDescriptorGrid(a.d1);
  const DescriptorGrid d2 = LoadDescriptorGrid(a.d2);
  if (a.k == 0) throw Error(ErrorCode::kInvalidArgument, "--k must be positive");
  const MatchResult result = a.mode == "full"
                                 ? FullReciprocalMatchesWithStats(d1, d2)
                                 : FastReciprocalMatches(d1, d2, std::min(a.k, d1.pixel_count()), a.max_iters);
  SaveCorrespondences(result.matches, a.out);
  if (!a.stats.empty()) {
    std::ofstream out = OpenOutput(a.stats);
    out << "iteration,active\n";
    for (std::size_t t = 0; t < result.stats.active_counts.size(); ++t) {
      out << t << ',' << result.stats.active_counts[t] << '\n';
    }
  }
  std::cout << "matches: " << result.matches.size() << "\n";
  if (a.mode == "fast") {
    std::cout << "iterations: " << result.stats.iterations_run << "\ndropped: " << result.stats.dropped << "\n";
  }
  return kExitOk;
}

int RunC2f(const C2fArgs& a) {
  const Manifest manifest = LoadManifest(a.manifest);
  const ManifestProvider provider(manifest);
  CoarseToFineOptions options;
  options.k = a.k;
  options.max_iters = a.max_iters;
  options.coverage = a.coverage;
  if (a.k == 0) throw Error(ErrorCode::kInvalidArgument, "--k must be positive");
  const CoarseToFineResult result =
      CoarseToFineMatch(provider, manifest.size1, manifest.size2, manifest.Windows(0), manifest.Windows(1), options);
  SaveCorrespondences(result.matches, a.out);
  std::cout << "coarse_matches: " << result.coarse.size() << "\nwindow_pairs: " << result.selection.pairs.size()
            << "\ncovered_fraction: " << result.selection.covered_fraction()
            << "\nmatches: " << result.matches.size() << "\n";
  return kExitOk;
}

void WritePgm(const BasinMap& basins, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << "P5\n" << basins.shape1.width << ' ' << basins.shape1.height << "\n255\n";
  std::vector<unsigned char> bytes(basins.labels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<unsigned char>(basins.labels[i] % 256);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

int RunBasins(const BasinArgs& a) {
  const DescriptorGrid d1 = LoadDescriptorGrid(a.d1);
  const DescriptorGrid d2 = LoadDescriptorGrid(a.d2);
  const BasinMap basins = ComputeBasins(d1, d2);
  SaveLabelGrid(LabelGrid{basins.shape1, basins.labels}, a.out_labels);
  if (!a.out_pgm.empty()) WritePgm(basins, a.out_pgm);
  std::cout << "basins: " << basins.basin_count() << "\n";
  return kExitOk;
}

int RunBenchCommand(const BenchArgs& a) {
  const SceneSpec spec = LoadSceneSpec(a.scene);
  BenchOptions options;
  options.repeat = a.repeat;
  options.max_iters = a.max_iters;
  options.k_list.clear();
  for (const auto& k : SplitCsv(a.k_list)) options.k_list.push_back(ParseCount(k, "k-list"));
  options.modes.clear();
  for (const auto& m : SplitCsv(a.modes)) options.modes.push_back(ParseBenchMode(m));
  if (options.modes.empty()) throw Error(ErrorCode::kInvalidArgument, "--modes is empty");
  const Scene scene = GenerateScene(spec);
  const auto records = RunBench(scene, spec.seed, options);
  std::ofstream out = OpenOutput(a.out);
  WriteBenchCsv(records, out);
  std::cout << "rows: " << records.size() << "\n";
  return kExitOk;
}

int RunLoss(const LossArgs& a) {
  a.config.Validate();
  const bool conf_group = !a.pred.empty() || !a.gt.empty() || !a.conf.empty();
  const bool match_group = !a.d1.empty() || !a.d2.empty() || !a.pairs.empty();
  if (conf_group && (a.pred.empty() || a.gt.empty() || a.conf.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "--pred, --gt and --conf must be given together");
  }
  if (match_group && (a.d1.empty() || a.d2.empty() || a.pairs.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "--d1, --d2 and --pairs must be given together");
  }
  if (!conf_group && !match_group) throw Error(ErrorCode::kInvalidArgument, "nothing to evaluate");

  nlohmann::json record;
  record["L_conf"] = nullptr;
  record["L_match"] = nullptr;
  record["z"] = nullptr;
  record["z_gt"] = nullptr;
  double conf_loss = 0.0, match_loss = 0.0;
  if (conf_group) {
    const PointMap pred = LoadPointMap(a.pred);
    const PointMap gt = LoadPointMap(a.gt);
    const ConfidenceMap conf = LoadConfidenceMap(a.conf);
    const RegressionLoss regression = ComputeRegressionLoss(pred, gt, a.config.metric_mode);
    conf_loss = ConfidenceLoss(regression, conf, a.config.alpha);
    record["L_conf"] = conf_loss;
    record["z"] = regression.normalization.z;
    record["z_gt"] = regression.normalization.z_gt;
  }
  if (match_group) {
    const DescriptorGrid d1 = LoadDescriptorGrid(a.d1);
    const DescriptorGrid d2 = LoadDescriptorGrid(a.d2);
    const CorrespondenceSet pairs = LoadCorrespondences(a.pairs);
    match_loss = MatchingLoss(d1, d2, pairs, a.config.tau);
    record["L_match"] = match_loss;
  }
  record["L_total"] = TotalLoss(conf_loss, match_loss, a.config.beta);
  std::cout << record.dump() << "\n";
  return kExitOk;
}

int RunSynth(const SynthArgs& a) {
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  if (a.random) {
    const auto [d1, d2] = GenerateRandomGrids(a.height, a.width, a.dim, a.seed);
    SaveDescriptorGrid(d1, dir / "d1.dgrd");
    SaveDescriptorGrid(d2, dir / "d2.dgrd");
    std::cout << "wrote d1.dgrd d2.dgrd\n";
    return kExitOk;
  }
  if (a.scene.empty()) throw Error(ErrorCode::kInvalidArgument, "either --scene or --random is required");
  const Scene scene = GenerateScene(LoadSceneSpec(a.scene));
  SaveDescriptorGrid(scene.d1, dir / "d1.dgrd");
  SaveDescriptorGrid(scene.d2, dir / "d2.dgrd");
  SaveCorrespondencesText(scene.gt, dir / "gt.txt");
  SavePointMap(scene.x1, dir / "x1.pmap");
  SavePointMap(scene.x2, dir / "x2.pmap");
  std::cout << "wrote d1.dgrd d2.dgrd gt.txt x1.pmap x2.pmap (" << scene.gt.size() << " ground-truth pairs)\n";
  return kExitOk;
}

}  // namespace

int Run(int argc, const char* const* argv) {
  CLI::App app{"Dense reciprocal matching of descriptor grids"};
  app.require_subcommand(1);

  MatchArgs match;
  auto* match_cmd = app.add_subcommand("match", "Reciprocal matches between two descriptor grids");
  match_cmd->add_option("--d1", match.d1, "Grid of image 1 (DGRD)")->required();
  match_cmd->add_option("--d2", match.d2, "Grid of image 2 (DGRD)")->required();
  match_cmd->add_option("--mode", match.mode, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  match_cmd->add_option("--k", match.k, "Seed count for fast mode, capped at the pixel count");
  match_cmd->add_option("--max-iters", match.max_iters, "Iteration cap for fast mode");
  match_cmd->add_option("--out", match.out, "Output correspondences (.corr binary, text otherwise)")->required();
  match_cmd->add_option("--stats", match.stats, "Per-iteration active walk counts (CSV)");

  C2fArgs c2f;
  auto* c2f_cmd = app.add_subcommand("c2f", "Coarse-to-fine matching over a window manifest");
  c2f_cmd->add_option("--manifest", c2f.manifest, "Window manifest (JSON)")->required();
  c2f_cmd->add_option("--k", c2f.k, "Seed count per matching pass");
  c2f_cmd->add_option("--max-iters", c2f.max_iters, "Iteration cap per matching pass");
  c2f_cmd->add_option("--coverage", c2f.coverage, "Target fraction of coarse matches covered")
      ->check(CLI::Range(0.0, 1.0));
  c2f_cmd->add_option("--out", c2f.out, "Output correspondences")->required();

  BasinArgs basins;
  auto* basins_cmd = app.add_subcommand("basins", "Convergence basins of the nearest-neighbor graph");
  basins_cmd->add_option("--d1", basins.d1, "Grid of image 1 (DGRD)")->required();
  basins_cmd->add_option("--d2", basins.d2, "Grid of image 2 (DGRD)")->required();
  basins_cmd->add_option("--out-labels", basins.out_labels, "Basin ids of image-1 pixels (BLBL)")->required();
  basins_cmd->add_option("--out-pgm", basins.out_pgm, "Basin ids modulo 256 as a PGM image");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Timing and quality sweep on a synthetic scene");
  bench_cmd->add_option("--scene", bench.scene, "Scene document (JSON)")->required();
  bench_cmd->add_option("--k-list", bench.k_list, "Comma-separated seed counts");
  bench_cmd->add_option("--modes", bench.modes, "Comma-separated subset of fast,full,naive,basin");
  bench_cmd->add_option("--repeat", bench.repeat, "Repetitions per configuration");
  bench_cmd->add_option("--max-iters", bench.max_iters, "Iteration cap for fast mode");
  bench_cmd->add_option("--out", bench.out, "Output CSV")->required();

  LossArgs loss;
  auto* loss_cmd = app.add_subcommand("loss", "Evaluate the training losses");
  loss_cmd->add_option("--pred", loss.pred, "Predicted pointmap (PMAP)");
  loss_cmd->add_option("--gt", loss.gt, "Ground-truth pointmap (PMAP)");
  loss_cmd->add_option("--conf", loss.conf, "Confidence map (CONF)");
  loss_cmd->add_option("--d1", loss.d1, "Grid of image 1 (DGRD)");
  loss_cmd->add_option("--d2", loss.d2, "Grid of image 2 (DGRD)");
  loss_cmd->add_option("--pairs", loss.pairs, "Training correspondences");
  loss_cmd->add_option("--alpha", loss.config.alpha, "Confidence regularizer weight");
  loss_cmd->add_option("--beta", loss.config.beta, "Matching loss weight");
  loss_cmd->add_option("--tau", loss.config.tau, "InfoNCE temperature");
  loss_cmd->add_option("--metric", loss.config.metric_mode, "Share the ground-truth normalizer");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic scene or random grids");
  synth_cmd->add_option("--scene", synth.scene, "Scene document (JSON)");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_flag("--random", synth.random, "Independent Gaussian grids instead of a scene");
  synth_cmd->add_option("--height", synth.height, "Random grid height");
  synth_cmd->add_option("--width", synth.width, "Random grid width");
  synth_cmd->add_option("--dim", synth.dim, "Random grid channels");
  synth_cmd->add_option("--seed", synth.seed, "Random grid seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*match_cmd) return RunMatch(match);
    if (*c2f_cmd) return RunC2f(c2f);
    if (*basins_cmd) return RunBasins(basins);
    if (*bench_cmd) return RunBenchCommand(bench);
    if (*loss_cmd) return RunLoss(loss);
    if (*synth_cmd) return RunSynth(synth);
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return IsInputError(e.code()) ? kExitInputError : kExitInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace recimatch::cli
