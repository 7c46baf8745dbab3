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


#include "cli/bench.h"

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

#include "recimatch/basins.h"
#include "recimatch/error.h"
#include "recimatch/matcher.h"

namespace recimatch::cli {
namespace {

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double SubsetRate(const CorrespondenceSet& matches, const CorrespondenceSet& oracle) {
  if (matches.empty()) return 1.0;
  std::size_t hits = 0;
  for (const auto& c : matches) hits += oracle.contains(c.first, c.second) ? 1 : 0;
  return static_cast<double>(hits) / matches.size();
}

BenchRecord Record(BenchMode mode, std::size_t k, std::size_t repeat, const MatchRunStats& stats,
                   const CorrespondenceSet& matches, const CorrespondenceSet& oracle) {
  BenchRecord r;
  r.mode = mode;
  r.k = k;
  r.repeat = repeat;
  r.index_ms = stats.index_ms;
  r.search_ms = stats.search_ms;
  r.collect_ms = stats.collect_ms;
  r.total_ms = stats.index_ms + stats.search_ms + stats.collect_ms;
  r.num_matches = matches.size();
  r.oracle_subset_rate = SubsetRate(matches, oracle);
  r.coverage_area = CoverageArea(matches);
  return r;
}

}  // namespace

BenchMode ParseBenchMode(const std::string& name) {
  if (name == "fast") return BenchMode::kFast;
  if (name == "full") return BenchMode::kFull;
  if (name == "naive") return BenchMode::kNaive;
  if (name == "basin") return BenchMode::kBasin;
  throw Error(ErrorCode::kParse, "unknown bench mode '" + name + "' (expected fast, full, naive or basin)");
}

const char* BenchModeName(BenchMode mode) {
  switch (mode) {
    case BenchMode::kFast:
      return "fast";
    case BenchMode::kFull:
      return "full";
    case BenchMode::kNaive:
      return "naive";
    case BenchMode::kBasin:
      return "basin";
  }
  return "?";
}

double CoverageArea(const CorrespondenceSet& matches) {
  const std::size_t n = matches.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (const auto& c : matches) {
    mx += c.first.u;
    my += c.first.v;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& c : matches) {
    const double dx = c.first.u - mx;
    const double dy = c.first.v - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  sxx /= n;
  syy /= n;
  sxy /= n;
  return std::numbers::pi * std::sqrt(std::max(0.0, sxx * syy - sxy * sxy));
}

std::vector<BenchRecord> RunBench(const Scene& scene, std::uint64_t seed, const BenchOptions& options) {
  if (options.repeat == 0) throw Error(ErrorCode::kInvalidArgument, "repeat must be at least 1");
  bool needs_k = false, needs_basins = false;
  for (BenchMode m : options.modes) {
    needs_k = needs_k || m != BenchMode::kFull;
    needs_basins = needs_basins || m == BenchMode::kBasin;
  }
  if (needs_k && options.k_list.empty()) throw Error(ErrorCode::kInvalidArgument, "k-list is empty");
  for (std::size_t k : options.k_list) {
    if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  }

  std::vector<BenchRecord> records;
  for (std::size_t rep = 0; rep < options.repeat; ++rep) {
    // The exhaustive run serves as oracle for every row of this repeat.
    const MatchResult full = FullReciprocalMatchesWithStats(scene.d1, scene.d2);
    std::optional<BasinMap> basins;
    double basin_ms = 0.0;
    if (needs_basins) {
      const NeighborTables tables = ComputeNeighborTables(scene.d1, scene.d2);
      const auto start = Clock::now();
      basins = ComputeBasins(tables);
      basin_ms = MsSince(start);
    }
    const std::uint64_t rep_seed = seed * 1000003ULL + rep;

    for (BenchMode mode : options.modes) {
      if (mode == BenchMode::kFull) {
        records.push_back(Record(mode, 0, rep, full.stats, full.matches, full.matches));
        continue;
      }
      for (std::size_t k : options.k_list) {
        const std::size_t seeds = std::min(k, scene.d1.pixel_count());
        const MatchResult fast = FastReciprocalMatches(scene.d1, scene.d2, seeds, options.max_iters);
        if (mode == BenchMode::kFast) {
          records.push_back(Record(mode, k, rep, fast.stats, fast.matches, full.matches));
          continue;
        }
        const std::size_t target = fast.matches.size();
        MatchRunStats stats = full.stats;
        const auto start = Clock::now();
        const CorrespondenceSet picked = mode == BenchMode::kNaive
                                             ? NaiveSubsample(full.matches, target, rep_seed)
                                             : BasinBiasedSubsample(full.matches, *basins, target, rep_seed);
        stats.collect_ms += MsSince(start) + (mode == BenchMode::kBasin ? basin_ms : 0.0);
        records.push_back(Record(mode, k, rep, stats, picked, full.matches));
      }
    }
  }
  return records;
}

void WriteBenchCsv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << "#schema=" << kBenchSchema << '\n' << kBenchHeader << '\n';
  for (const auto& r : records) {
    out << BenchModeName(r.mode) << ',' << r.k << ',' << r.repeat << ',' << r.index_ms << ',' << r.search_ms << ','
        << r.collect_ms << ',' << r.total_ms << ',' << r.num_matches << ',' << r.oracle_subset_rate << ','
        << r.coverage_area << '\n';
  }
}

}  // namespace recimatch::cli
