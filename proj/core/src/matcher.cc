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

#include "recimatch/matcher.h"

#include <algorithm>
#include <chrono>
#include <limits>
#include <string>
#include <unordered_set>

#include "recimatch/error.h"
#include "recimatch/nn_index.h"

namespace recimatch {
namespace {

using Clock = std::chrono::steady_clock;

double MillisecondsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr std::uint32_t kUnresolved = std::numeric_limits<std::uint32_t>::max();

void CheckMatchable(const DescriptorGrid& d1, const DescriptorGrid& d2) {
  if (d1.dim() != d2.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "descriptor dimensions differ: " + std::to_string(d1.dim()) + " vs " + std::to_string(d2.dim()));
  }
  if (!d1.normalized() || !d2.normalized()) {
    throw Error(ErrorCode::kNotNormalized, "reciprocal matching requires normalized descriptor grids");
  }
}

// Gathers the descriptors of the given pixels back to back.
std::vector<float> Gather(const DescriptorGrid& grid, const std::vector<std::uint32_t>& pixels) {
  std::vector<float> out;
  out.reserve(pixels.size() * grid.dim());
  for (std::uint32_t p : pixels) {
    const auto d = grid.descriptor(p);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

// Memoized nearest-neighbor lookups from one grid into an index over the other.
class NeighborCache {
 public:
  NeighborCache(const DescriptorGrid& source, const NNIndex& target)
      : source_(source), target_(target), table_(source.pixel_count(), kUnresolved) {}

  // Resolves every listed pixel with one batched query over the distinct
  // unresolved ones.
  std::size_t Resolve(const std::vector<std::uint32_t>& pixels) {
    std::vector<std::uint32_t> pending;
    for (std::uint32_t p : pixels) {
      if (table_[p] == kUnresolved) {
        table_[p] = kUnresolved - 1;  // queued
        pending.push_back(p);
      }
    }
    if (pending.empty()) return 0;
    const auto found = target_.BatchQueryLinear(Gather(source_, pending));
    for (std::size_t i = 0; i < pending.size(); ++i) table_[pending[i]] = found[i];
    return pending.size();
  }

  std::uint32_t operator[](std::uint32_t p) const { return table_[p]; }

 private:
  const DescriptorGrid& source_;
  const NNIndex& target_;
  std::vector<std::uint32_t> table_;
};

struct Walk {
  std::uint32_t u = 0;  // current image-1 pixel
  std::uint32_t v = 0;  // last image-2 pixel visited
  bool has_v = false;
};

}  // namespace

SeedSet SeedGrid(std::uint32_t height, std::uint32_t width, std::size_t k) {
  const std::size_t pixels = static_cast<std::size_t>(height) * width;
  if (pixels == 0) throw Error(ErrorCode::kEmptyGrid, "cannot seed an empty grid");
  if (k < 1 || k > pixels) {
    throw Error(ErrorCode::kInvalidArgument,
                "seed count k = " + std::to_string(k) + " outside [1, " + std::to_string(pixels) + "]");
  }
  // rows = ceil(sqrt(k*H/W)), computed exactly in integers.
  std::size_t rows = 1;
  while (rows * rows * width < k * height) ++rows;
  rows = std::min<std::size_t>(rows, height);
  const std::size_t cols = std::min<std::size_t>((k + rows - 1) / rows, width);

  std::vector<PixelCoord> lattice;
  lattice.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto v = static_cast<std::uint32_t>(((2 * r + 1) * height) / (2 * rows));
    for (std::size_t c = 0; c < cols; ++c) {
      const auto u = static_cast<std::uint32_t>(((2 * c + 1) * width) / (2 * cols));
      lattice.push_back({u, v});
    }
  }

  SeedSet seeds;
  seeds.k = k;
  if (lattice.size() <= k) {
    seeds.pixels = std::move(lattice);
  } else {
    seeds.pixels.reserve(k);
    for (std::size_t i = 0; i < k; ++i) seeds.pixels.push_back(lattice[i * lattice.size() / k]);
  }
  return seeds;
}

NeighborTables ComputeNeighborTables(const DescriptorGrid& d1, const DescriptorGrid& d2) {
  CheckMatchable(d1, d2);
  const NNIndex index1 = NNIndex::Build(d1, NNBackend::kBruteForce);
  const NNIndex index2 = NNIndex::Build(d2, NNBackend::kBruteForce);
  NeighborTables tables;
  tables.shape1 = d1.shape();
  tables.shape2 = d2.shape();
  tables.forward = index2.BatchQueryLinear(d1.data());
  tables.backward = index1.BatchQueryLinear(d2.data());
  return tables;
}

MatchResult FullReciprocalMatchesWithStats(const DescriptorGrid& d1, const DescriptorGrid& d2) {
  const auto start = Clock::now();
  CheckMatchable(d1, d2);
  MatchResult result;

  auto phase = Clock::now();
  const NNIndex index1 = NNIndex::Build(d1, NNBackend::kBruteForce);
  const NNIndex index2 = NNIndex::Build(d2, NNBackend::kBruteForce);
  result.stats.index_ms = MillisecondsSince(phase);

  phase = Clock::now();
  const auto forward = index2.BatchQueryLinear(d1.data());
  const auto backward = index1.BatchQueryLinear(d2.data());
  result.stats.search_ms = MillisecondsSince(phase);
  result.stats.nn_queries = forward.size() + backward.size();

  phase = Clock::now();
  std::vector<Correspondence> pairs;
  for (std::uint32_t i = 0; i < forward.size(); ++i) {
    const std::uint32_t j = forward[i];
    if (backward[j] == i) pairs.push_back({d1.shape().pixel(i), d2.shape().pixel(j)});
  }
  result.matches = CorrespondenceSet(std::move(pairs));
  result.stats.collect_ms = MillisecondsSince(phase);
  result.stats.iterations_run = 1;
  result.stats.total_ms = MillisecondsSince(start);
  return result;
}

CorrespondenceSet FullReciprocalMatches(const DescriptorGrid& d1, const DescriptorGrid& d2) {
  return FullReciprocalMatchesWithStats(d1, d2).matches;
}

MatchResult FastReciprocalMatches(const DescriptorGrid& d1, const DescriptorGrid& d2, std::size_t k,
                                  std::size_t max_iters) {
  CheckMatchable(d1, d2);
  return FastReciprocalMatchesFromSeeds(d1, d2, SeedGrid(d1.height(), d1.width(), k), max_iters);
}

MatchResult FastReciprocalMatchesFromSeeds(const DescriptorGrid& d1, const DescriptorGrid& d2, const SeedSet& seeds,
                                           std::size_t max_iters) {
  const auto start = Clock::now();
  CheckMatchable(d1, d2);
  if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  if (seeds.pixels.size() > seeds.k) throw Error(ErrorCode::kInvalidArgument, "seed set holds more than k pixels");

  MatchResult result;
  MatchRunStats& stats = result.stats;
  const GridShape shape1 = d1.shape();
  const GridShape shape2 = d2.shape();

  std::vector<Walk> active;
  active.reserve(seeds.pixels.size());
  {
    std::unordered_set<std::uint64_t> distinct;
    for (const PixelCoord& p : seeds.pixels) {
      if (!shape1.contains(p)) throw Error(ErrorCode::kOutOfBounds, "seed outside image 1");
      if (!distinct.insert(PixelKey(p)).second) throw Error(ErrorCode::kDuplicatePixel, "seed pixels must be distinct");
      active.push_back({static_cast<std::uint32_t>(shape1.linear_index(p)), 0, false});
    }
  }

  auto phase = Clock::now();
  const NNIndex index1 = NNIndex::Build(d1, NNBackend::kBruteForce);
  const NNIndex index2 = NNIndex::Build(d2, NNBackend::kBruteForce);
  stats.index_ms = MillisecondsSince(phase);

  NeighborCache forward(d1, index2);
  NeighborCache backward(d2, index1);
  std::unordered_set<std::uint64_t> emitted_keys;
  std::vector<Correspondence> emitted;
  auto emit = [&](std::uint32_t u, std::uint32_t v) {
    const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
    if (emitted_keys.insert(key).second) emitted.push_back({shape1.pixel(u), shape2.pixel(v)});
  };

  stats.active_counts.push_back(active.size());
  std::vector<std::uint32_t> batch;
  std::vector<Walk> next;
  for (std::size_t iter = 1; iter <= max_iters && !active.empty(); ++iter) {
    // U^t -> V^t
    phase = Clock::now();
    batch.clear();
    for (const Walk& w : active) batch.push_back(w.u);
    stats.nn_queries += forward.Resolve(batch);
    stats.search_ms += MillisecondsSince(phase);

    // A walk whose V repeats has closed the cycle (u, v) one query early.
    phase = Clock::now();
    next.clear();
    for (const Walk& w : active) {
      const std::uint32_t v = forward[w.u];
      if (w.has_v && v == w.v) {
        emit(w.u, v);
      } else {
        next.push_back({w.u, v, true});
      }
    }
    active.swap(next);
    stats.collect_ms += MillisecondsSince(phase);

    // V^t -> U^{t+1}
    phase = Clock::now();
    batch.clear();
    for (const Walk& w : active) batch.push_back(w.v);
    stats.nn_queries += backward.Resolve(batch);
    stats.search_ms += MillisecondsSince(phase);

    phase = Clock::now();
    next.clear();
    for (const Walk& w : active) {
      const std::uint32_t u_next = backward[w.v];
      if (u_next == w.u) {
        emit(w.u, w.v);
      } else {
        next.push_back({u_next, w.v, true});
      }
    }
    active.swap(next);
    stats.collect_ms += MillisecondsSince(phase);

    stats.iterations_run = iter;
    stats.active_counts.push_back(active.size());
  }
  stats.dropped = active.size();

  std::sort(emitted.begin(), emitted.end(), PairLess);
  result.matches = CorrespondenceSet(std::move(emitted));
  stats.total_ms = MillisecondsSince(start);
  return result;
}

}  // namespace recimatch
