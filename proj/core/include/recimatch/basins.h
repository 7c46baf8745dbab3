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
#include <optional>
#include <vector>

#include "recimatch/grids.h"
#include "recimatch/matcher.h"

namespace recimatch {

// Decomposition of image 1 into convergence basins of the nearest-neighbor
// graph: every walk started inside a basin ends in the same root cycle.
struct BasinMap {
  GridShape shape1;
  GridShape shape2;
  // Basin id of each image-1 pixel, ids numbered in order of discovery
  // scanning image 1 row-major.
  std::vector<std::uint32_t> labels;
  // Root pair per basin. For cycles longer than two nodes this is the
  // smallest image-1 node of the cycle and its nearest neighbor.
  std::vector<Correspondence> roots;
  // Image-1 pixel count per basin.
  std::vector<std::size_t> sizes;
  // Node count (both images) of each root cycle; 2 for a reciprocal pair.
  std::vector<std::size_t> cycle_lengths;

  std::size_t basin_count() const { return roots.size(); }
  std::optional<std::uint32_t> BasinOfRoot(const Correspondence& pair) const;
};

BasinMap ComputeBasins(const DescriptorGrid& d1, const DescriptorGrid& d2);
BasinMap ComputeBasins(const NeighborTables& tables);

// Draws min(k, |full|) pairs without replacement, each draw choosing among the
// remaining pairs with probability proportional to basin size. Every pair of
// full must be a basin root. Deterministic per seed; output keeps input order.
CorrespondenceSet BasinBiasedSubsample(const CorrespondenceSet& full, const BasinMap& basins, std::size_t k,
                                       std::uint64_t seed);

// Uniform subsample without replacement; output keeps input order.
CorrespondenceSet NaiveSubsample(const CorrespondenceSet& full, std::size_t k, std::uint64_t seed);

}  // namespace recimatch
