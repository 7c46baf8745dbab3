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

#include "recimatch/basins.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "recimatch/error.h"
#include "recimatch/rng.h"

namespace recimatch {
namespace {

constexpr std::uint32_t kNoBasin = std::numeric_limits<std::uint32_t>::max();

// Weighted sampling without replacement by exponential keys: the k largest
// log(U)/w reproduce successive draws proportional to w.
std::vector<std::size_t> WeightedSample(const std::vector<double>& weights, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = 1.0 - rng.Uniform01();  // (0, 1]
    keys.emplace_back(std::log(u) / weights[i], i);
  }
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::size_t> picked(k);
  for (std::size_t i = 0; i < k; ++i) picked[i] = keys[i].second;
  std::sort(picked.begin(), picked.end());
  return picked;
}

CorrespondenceSet Select(const CorrespondenceSet& full, const std::vector<std::size_t>& picked) {
  std::vector<Correspondence> out;
  out.reserve(picked.size());
  for (std::size_t i : picked) out.push_back(full[i]);
  return CorrespondenceSet(std::move(out));
}

}  // namespace

std::optional<std::uint32_t> BasinMap::BasinOfRoot(const Correspondence& pair) const {
  if (!shape1.contains(pair.first) || !shape2.contains(pair.second)) return std::nullopt;
  const std::uint32_t basin = labels[shape1.linear_index(pair.first)];
  if (roots[basin].first == pair.first && roots[basin].second == pair.second) return basin;
  return std::nullopt;
}

BasinMap ComputeBasins(const DescriptorGrid& d1, const DescriptorGrid& d2) {
  return ComputeBasins(ComputeNeighborTables(d1, d2));
}

BasinMap ComputeBasins(const NeighborTables& tables) {
  const std::size_t n1 = tables.shape1.pixel_count();
  const std::size_t n2 = tables.shape2.pixel_count();
  if (tables.forward.size() != n1 || tables.backward.size() != n2) {
    throw Error(ErrorCode::kShapeMismatch, "neighbor tables do not match the grid shapes");
  }

  // Functional graph over n1 + n2 nodes: image-1 node i -> n1 + forward[i],
  // image-2 node n1 + j -> backward[j].
  auto successor = [&](std::size_t node) -> std::size_t {
    return node < n1 ? n1 + tables.forward[node] : tables.backward[node - n1];
  };
  enum : std::uint8_t { kUnseen = 0, kOnPath = 1, kDone = 2 };
  std::vector<std::uint8_t> state(n1 + n2, kUnseen);
  std::vector<std::uint32_t> basin_of(n1 + n2, kNoBasin);

  BasinMap map;
  map.shape1 = tables.shape1;
  map.shape2 = tables.shape2;
  std::vector<std::size_t> path;
  for (std::size_t start = 0; start < n1; ++start) {
    if (state[start] != kUnseen) continue;
    path.clear();
    std::size_t node = start;
    while (state[node] == kUnseen) {
      state[node] = kOnPath;
      path.push_back(node);
      node = successor(node);
    }
    std::uint32_t basin;
    if (state[node] == kOnPath) {
      // The walk closed on itself: path from `node` onward is a new root cycle.
      basin = static_cast<std::uint32_t>(map.roots.size());
      const auto cycle_begin = std::find(path.begin(), path.end(), node);
      std::size_t root1 = std::numeric_limits<std::size_t>::max();
      for (auto it = cycle_begin; it != path.end(); ++it) {
        if (*it < n1) root1 = std::min(root1, *it);
      }
      map.roots.push_back({tables.shape1.pixel(root1), tables.shape2.pixel(tables.forward[root1])});
      map.cycle_lengths.push_back(static_cast<std::size_t>(path.end() - cycle_begin));
      map.sizes.push_back(0);
    } else {
      basin = basin_of[node];
    }
    for (std::size_t p : path) {
      state[p] = kDone;
      basin_of[p] = basin;
    }
  }

  map.labels.assign(basin_of.begin(), basin_of.begin() + static_cast<std::ptrdiff_t>(n1));
  for (std::uint32_t label : map.labels) ++map.sizes[label];
  return map;
}

CorrespondenceSet BasinBiasedSubsample(const CorrespondenceSet& full, const BasinMap& basins, std::size_t k,
                                       std::uint64_t seed) {
  std::vector<double> weights;
  weights.reserve(full.size());
  for (const auto& pair : full) {
    const auto basin = basins.BasinOfRoot(pair);
    if (!basin) {
      throw Error(ErrorCode::kInvalidArgument, "pair (" + std::to_string(pair.first.u) + "," +
                                                   std::to_string(pair.first.v) + ")-(" +
                                                   std::to_string(pair.second.u) + "," +
                                                   std::to_string(pair.second.v) + ") is not a basin root");
    }
    weights.push_back(static_cast<double>(basins.sizes[*basin]));
  }
  if (k >= full.size()) return full;
  return Select(full, WeightedSample(weights, k, seed));
}

CorrespondenceSet NaiveSubsample(const CorrespondenceSet& full, std::size_t k, std::uint64_t seed) {
  if (k >= full.size()) return full;
  Rng rng(seed);
  std::vector<std::size_t> order(full.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.UniformInt(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(k);
  std::sort(order.begin(), order.end());
  return Select(full, order);
}

}  // namespace recimatch
