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
#include <vector>

#include "recimatch/grids.h"

namespace recimatch {

inline constexpr std::size_t kDefaultSeedCount = 3000;
inline constexpr std::size_t kDefaultMaxIterations = 10;

// Initial walk positions U^0 in image 1.
struct SeedSet {
  std::vector<PixelCoord> pixels;
  std::size_t k = 0;
};

// Regular lattice of cell centers: ceil(sqrt(k*H/W)) rows and ceil(k/rows)
// columns, thinned by even striding to at most k pixels. Row-major order.
SeedSet SeedGrid(std::uint32_t height, std::uint32_t width, std::size_t k);

struct MatchRunStats {
  // active_counts[t] is the number of walks still active after t iterations;
  // active_counts[0] is the seed count.
  std::vector<std::size_t> active_counts;
  std::size_t iterations_run = 0;
  // Walks still active when the iteration cap was reached.
  std::size_t dropped = 0;
  std::size_t nn_queries = 0;
  double index_ms = 0.0;
  double search_ms = 0.0;
  double collect_ms = 0.0;
  double total_ms = 0.0;
};

struct MatchResult {
  CorrespondenceSet matches;
  MatchRunStats stats;
};

// Nearest-neighbor maps between two descriptor grids, as linear indices:
// forward[i] = NN in grid 2 of pixel i of grid 1, backward[j] = NN in grid 1
// of pixel j of grid 2.
struct NeighborTables {
  GridShape shape1;
  GridShape shape2;
  std::vector<std::uint32_t> forward;
  std::vector<std::uint32_t> backward;
};

NeighborTables ComputeNeighborTables(const DescriptorGrid& d1, const DescriptorGrid& d2);

// Every mutual nearest-neighbor pair, sorted by grid-1 pixel. O(H^2 W^2 d).
CorrespondenceSet FullReciprocalMatches(const DescriptorGrid& d1, const DescriptorGrid& d2);
MatchResult FullReciprocalMatchesWithStats(const DescriptorGrid& d1, const DescriptorGrid& d2);

// Alternating nearest-neighbor walks from SeedGrid(H1, W1, k). A walk stops
// when it closes a two-node cycle; the cycle is emitted as a match. Output is
// deduplicated, sorted by grid-1 pixel and has at most k pairs.
MatchResult FastReciprocalMatches(const DescriptorGrid& d1, const DescriptorGrid& d2,
                                  std::size_t k = kDefaultSeedCount,
                                  std::size_t max_iters = kDefaultMaxIterations);

MatchResult FastReciprocalMatchesFromSeeds(const DescriptorGrid& d1, const DescriptorGrid& d2, const SeedSet& seeds,
                                           std::size_t max_iters = kDefaultMaxIterations);

}  // namespace recimatch
