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


#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "recimatch/grids.h"
#include "recimatch/synth.h"

namespace recimatch::cli {

// Bench CSV, schema version 1. The first line is "#schema=recimatch.bench/1",
// the second the column header:
//   mode,k,repeat,index_ms,search_ms,collect_ms,total_ms,num_matches,oracle_subset_rate,coverage_area
// Full mode ignores k and writes k=0. Naive and basin modes subsample the
// full matches down to the size of the fast result for the same k; their
// timings are the full-match phases plus subsampling (and basin labeling),
// charged to collect_ms.
inline constexpr const char* kBenchSchema = "recimatch.bench/1";
inline constexpr const char* kBenchHeader =
    "mode,k,repeat,index_ms,search_ms,collect_ms,total_ms,num_matches,oracle_subset_rate,coverage_area";

enum class BenchMode { kFast, kFull, kNaive, kBasin };

BenchMode ParseBenchMode(const std::string& name);
const char* BenchModeName(BenchMode mode);

struct BenchRecord {
  BenchMode mode = BenchMode::kFast;
  std::size_t k = 0;
  std::size_t repeat = 0;
  double index_ms = 0.0;
  double search_ms = 0.0;
  double collect_ms = 0.0;
  double total_ms = 0.0;
  std::size_t num_matches = 0;
  // Fraction of the output that is also a mutual nearest-neighbor pair; 1 for
  // an empty output.
  double oracle_subset_rate = 1.0;
  double coverage_area = 0.0;
};

struct BenchOptions {
  std::vector<std::size_t> k_list{3000};
  std::vector<BenchMode> modes{BenchMode::kFast};
  std::size_t repeat = 1;
  std::size_t max_iters = 10;
};

// Area pi * sqrt(det Sigma) of the one-sigma ellipse of the grid-1 pixel
// positions. 0 for fewer than two pairs.
double CoverageArea(const CorrespondenceSet& matches);

std::vector<BenchRecord> RunBench(const Scene& scene, std::uint64_t seed, const BenchOptions& options);
void WriteBenchCsv(const std::vector<BenchRecord>& records, std::ostream& out);

}  // namespace recimatch::cli
