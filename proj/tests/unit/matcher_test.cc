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


#include <algorithm>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "recimatch/basins.h"
#include "recimatch/matcher.h"
#include "recimatch/parallel.h"
#include "recimatch/synth.h"
#include "support/expect_error.h"
#include "support/oracles.h"

namespace recimatch {
namespace {

using testing::MakeGrid;
using testing::OracleNeighborTables;
using testing::OracleReciprocal;
using testing::OracleWalk;

// Pairwise-distinct unit descriptors: one-hot vectors of dimension H*W.
DescriptorGrid OneHotGrid(std::uint32_t h, std::uint32_t w) {
  const std::uint32_t n = h * w;
  std::vector<float> data(static_cast<std::size_t>(n) * n, 0.0f);
  for (std::uint32_t i = 0; i < n; ++i) data[static_cast<std::size_t>(i) * n + i] = 1.0f;
  return DescriptorGrid(h, w, n, std::move(data), true);
}

std::set<std::pair<std::size_t, std::size_t>> AsLinearPairs(const CorrespondenceSet& set, GridShape s1, GridShape s2) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& c : set) out.emplace(s1.linear_index(c.first), s2.linear_index(c.second));
  return out;
}

TEST(SeedGrid, TwoByTwoCellCenters) {
  const auto seeds = SeedGrid(4, 4, 4);
  const std::vector<PixelCoord> expected{{1, 1}, {3, 1}, {1, 3}, {3, 3}};
  EXPECT_EQ(seeds.pixels, expected);
  EXPECT_EQ(seeds.k, 4u);
}

TEST(SeedGrid, SaturatesToAllPixels) {
  const auto seeds = SeedGrid(5, 7, 35);
  ASSERT_EQ(seeds.pixels.size(), 35u);
  std::set<std::uint64_t> keys;
  for (auto p : seeds.pixels) keys.insert(PixelKey(p));
  EXPECT_EQ(keys.size(), 35u);
}

TEST(SeedGrid, ThreeByFiveSixSeeds) {
  const auto seeds = SeedGrid(3, 5, 6);
  ASSERT_EQ(seeds.pixels.size(), 6u);
  std::set<std::uint32_t> rows;
  std::set<std::uint32_t> cols;
  for (auto p : seeds.pixels) {
    EXPECT_LT(p.u, 5u);
    EXPECT_LT(p.v, 3u);
    rows.insert(p.v);
    cols.insert(p.u);
  }
  EXPECT_EQ(rows.size(), 2u);
  EXPECT_EQ(cols.size(), 3u);
}

TEST(SeedGrid, Properties) {
  for (std::uint32_t h : {1u, 3u, 17u, 64u}) {
    for (std::uint32_t w : {1u, 5u, 31u, 64u}) {
      for (std::size_t k : {std::size_t{1}, std::size_t{7}, std::size_t{100}, std::size_t{h} * w}) {
        if (k > std::size_t{h} * w) continue;
        const auto seeds = SeedGrid(h, w, k);
        EXPECT_LE(seeds.pixels.size(), k);
        EXPECT_GE(seeds.pixels.size(), 1u);
        std::set<std::uint64_t> keys;
        for (auto p : seeds.pixels) {
          EXPECT_LT(p.u, w);
          EXPECT_LT(p.v, h);
          keys.insert(PixelKey(p));
        }
        EXPECT_EQ(keys.size(), seeds.pixels.size());
        EXPECT_EQ(SeedGrid(h, w, k).pixels, seeds.pixels);
      }
    }
  }
}

TEST(SeedGrid, RejectsOutOfRangeK) {
  EXPECT_RECIMATCH_ERROR(SeedGrid(4, 4, 0), ErrorCode::kInvalidArgument);
  EXPECT_RECIMATCH_ERROR(SeedGrid(4, 4, 17), ErrorCode::kInvalidArgument);
}

TEST(FullReciprocal, IdentityGrids) {
  const auto grid = OneHotGrid(3, 4);
  const auto matches = FullReciprocalMatches(grid, grid);
  ASSERT_EQ(matches.size(), 12u);
  for (const auto& c : matches) EXPECT_EQ(c.first, c.second);
}

TEST(FullReciprocal, HandEvaluatedTwoPixelExample) {
  const DescriptorGrid d1(1, 2, 2, {1, 0, 0, 1}, true);
  const DescriptorGrid d2(1, 2, 2, {0.8f, 0.6f, 0.6f, 0.8f}, true);
  const auto matches = FullReciprocalMatches(d1, d2);
  const CorrespondenceSet expected({{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}});
  EXPECT_EQ(matches, expected);
  EXPECT_EQ(matches, OracleReciprocal(d1, d2));
}

TEST(FullReciprocal, RandomGridsAgreeWithOracle) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto [d1, d2] = GenerateRandomGrids(12, 12, 24, seed);
    const auto matches = FullReciprocalMatches(d1, d2);
    EXPECT_EQ(matches, OracleReciprocal(d1, d2));
    const auto tables = OracleNeighborTables(d1, d2);
    for (const auto& c : matches) {
      const auto i = d1.shape().linear_index(c.first);
      const auto j = d2.shape().linear_index(c.second);
      EXPECT_EQ(tables.forward[i], j);
      EXPECT_EQ(tables.backward[j], i);
    }
  }
}

TEST(FullReciprocal, Preconditions) {
  const auto [a, b] = GenerateRandomGrids(4, 4, 8, 1);
  const auto [c, d] = GenerateRandomGrids(4, 4, 6, 1);
  EXPECT_RECIMATCH_ERROR(FullReciprocalMatches(a, c), ErrorCode::kDimensionMismatch);
  const DescriptorGrid raw(1, 1, 8, std::vector<float>(8, 1.0f), false);
  EXPECT_RECIMATCH_ERROR(FullReciprocalMatches(raw, a), ErrorCode::kNotNormalized);
  EXPECT_RECIMATCH_ERROR(FastReciprocalMatches(a, c, 4, 10), ErrorCode::kDimensionMismatch);
  EXPECT_RECIMATCH_ERROR(FastReciprocalMatches(a, b, 4, 0), ErrorCode::kInvalidArgument);
  EXPECT_RECIMATCH_ERROR(FastReciprocalMatches(a, b, 0, 10), ErrorCode::kInvalidArgument);
}

TEST(FastReciprocal, IdentityConvergesAtFirstIteration) {
  const auto grid = OneHotGrid(4, 4);
  const auto result = FastReciprocalMatches(grid, grid, 4, 10);
  const CorrespondenceSet expected({{{1, 1}, {1, 1}}, {{3, 1}, {3, 1}}, {{1, 3}, {1, 3}}, {{3, 3}, {3, 3}}});
  EXPECT_EQ(result.matches, expected.Sorted());
  EXPECT_EQ(result.stats.iterations_run, 1u);
  ASSERT_GE(result.stats.active_counts.size(), 2u);
  EXPECT_EQ(result.stats.active_counts[0], 4u);
  EXPECT_EQ(result.stats.active_counts[1], 0u);
  EXPECT_EQ(result.stats.dropped, 0u);
}

TEST(FastReciprocal, SaturatedSeedsEqualFullMatching) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [d1, d2] = GenerateRandomGrids(10, 14, 24, 50 + seed);
    const auto fast = FastReciprocalMatches(d1, d2, 140, 50);
    EXPECT_EQ(fast.matches, FullReciprocalMatches(d1, d2));
  }
}

TEST(FastReciprocal, EqualsRootsOfSeededBasins) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [d1, d2] = GenerateRandomGrids(32, 32, 24, 60 + seed);
    const auto fast = FastReciprocalMatches(d1, d2, 64, 50);
    const auto basins = ComputeBasins(d1, d2);
    std::vector<Correspondence> roots;
    std::set<std::uint32_t> seen;
    for (auto s : SeedGrid(32, 32, 64).pixels) {
      const auto label = basins.labels[d1.shape().linear_index(s)];
      if (seen.insert(label).second) roots.push_back(basins.roots[label]);
    }
    EXPECT_EQ(fast.matches, CorrespondenceSet(roots).Sorted());
    EXPECT_LE(fast.matches.size(), 64u);
    const auto full = FullReciprocalMatches(d1, d2);
    for (const auto& c : fast.matches) EXPECT_TRUE(full.contains(c.first, c.second));
  }
}

TEST(FastReciprocal, RectangularAndMismatchedShapes) {
  const auto [a, unused1] = GenerateRandomGrids(9, 21, 16, 70);
  const auto [b, unused2] = GenerateRandomGrids(17, 6, 16, 71);
  const auto fast = FastReciprocalMatches(a, b, a.pixel_count(), 100);
  EXPECT_EQ(fast.matches, FullReciprocalMatches(a, b));
  EXPECT_EQ(fast.matches, OracleReciprocal(a, b));
}

TEST(FastReciprocal, ActiveCountsShrinkAndStatsAreConsistent) {
  const auto [d1, d2] = GenerateRandomGrids(32, 32, 24, 80);
  const auto result = FastReciprocalMatches(d1, d2, 200, 10);
  const auto& counts = result.stats.active_counts;
  ASSERT_FALSE(counts.empty());
  EXPECT_EQ(counts[0], SeedGrid(32, 32, 200).pixels.size());
  for (std::size_t t = 2; t < counts.size(); ++t) EXPECT_LE(counts[t], counts[t - 1]);
  EXPECT_EQ(counts.size(), result.stats.iterations_run + 1);
  EXPECT_EQ(result.stats.dropped, counts.back());
  EXPECT_GT(result.stats.nn_queries, 0u);
}

TEST(FastReciprocal, DropsWalksThatExceedMaxIters) {
  const auto [d1, d2] = GenerateRandomGrids(32, 32, 24, 81);
  const auto unlimited = FastReciprocalMatches(d1, d2, 300, 100);
  const auto one = FastReciprocalMatches(d1, d2, 300, 1);
  EXPECT_EQ(one.stats.iterations_run, 1u);
  EXPECT_EQ(one.stats.dropped, one.stats.active_counts.back());
  for (const auto& c : one.matches) EXPECT_TRUE(unlimited.matches.contains(c.first, c.second));
  EXPECT_LE(one.matches.size(), unlimited.matches.size());
}

TEST(FastReciprocal, ExplicitSeedsValidated) {
  const auto [d1, d2] = GenerateRandomGrids(4, 4, 8, 82);
  EXPECT_RECIMATCH_ERROR(FastReciprocalMatchesFromSeeds(d1, d2, SeedSet{{{4, 0}}, 1}, 5), ErrorCode::kOutOfBounds);
  EXPECT_RECIMATCH_ERROR(FastReciprocalMatchesFromSeeds(d1, d2, SeedSet{{{1, 1}, {1, 1}}, 2}, 5),
                         ErrorCode::kDuplicatePixel);
  const auto result = FastReciprocalMatchesFromSeeds(d1, d2, SeedSet{{{0, 0}, {3, 3}}, 2}, 50);
  EXPECT_LE(result.matches.size(), 2u);
}

TEST(FastReciprocal, IndependentOfThreadCount) {
  const auto [d1, d2] = GenerateRandomGrids(32, 32, 24, 83);
  SetThreadCount(1);
  const auto serial = FastReciprocalMatches(d1, d2, 150, 10);
  SetThreadCount(3);
  const auto parallel = FastReciprocalMatches(d1, d2, 150, 10);
  SetThreadCount(0);
  EXPECT_EQ(serial.matches, parallel.matches);
  EXPECT_EQ(serial.stats.active_counts, parallel.stats.active_counts);
}

TEST(FastReciprocal, OutputIsPartialBijection) {
  const auto [d1, d2] = GenerateRandomGrids(20, 20, 24, 84);
  const auto result = FastReciprocalMatches(d1, d2, 100, 10);
  std::set<std::uint64_t> firsts;
  std::set<std::uint64_t> seconds;
  for (const auto& c : result.matches) {
    EXPECT_TRUE(firsts.insert(PixelKey(c.first)).second);
    EXPECT_TRUE(seconds.insert(PixelKey(c.second)).second);
  }
}

TEST(Basins, IdentityGivesSingletons) {
  const auto grid = OneHotGrid(3, 3);
  const auto basins = ComputeBasins(grid, grid);
  EXPECT_EQ(basins.basin_count(), 9u);
  for (auto size : basins.sizes) EXPECT_EQ(size, 1u);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& root = basins.roots[basins.labels[i]];
    EXPECT_EQ(root.first, basins.shape1.pixel(i));
    EXPECT_EQ(root.second, basins.shape2.pixel(i));
  }
}

TEST(Basins, ConstantGridsGiveOneBasinRootedAtOrigin) {
  std::vector<float> data(5 * 4 * 3, 0.0f);
  for (std::size_t i = 0; i < 20; ++i) data[3 * i] = 1.0f;
  const DescriptorGrid grid(5, 4, 3, data, true);
  const auto basins = ComputeBasins(grid, grid);
  ASSERT_EQ(basins.basin_count(), 1u);
  EXPECT_EQ(basins.sizes[0], 20u);
  EXPECT_EQ(basins.roots[0].first, (PixelCoord{0, 0}));
  EXPECT_EQ(basins.roots[0].second, (PixelCoord{0, 0}));
  EXPECT_EQ(basins.cycle_lengths[0], 2u);
}

TEST(Basins, AgreeWithExhaustiveWalks) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto [d1, d2] = GenerateRandomGrids(16, 16, 24, 90 + seed);
    const auto basins = ComputeBasins(d1, d2);
    const auto tables = OracleNeighborTables(d1, d2);
    const auto reciprocal = OracleReciprocal(tables, d1.shape(), d2.shape());

    std::size_t total = 0;
    for (auto size : basins.sizes) total += size;
    EXPECT_EQ(total, d1.pixel_count());
    EXPECT_EQ(basins.basin_count(), reciprocal.size());
    for (const auto& root : basins.roots) EXPECT_TRUE(reciprocal.contains(root.first, root.second));
    for (auto length : basins.cycle_lengths) EXPECT_EQ(length, 2u);

    for (std::size_t i = 0; i < d1.pixel_count(); ++i) {
      const auto end = OracleWalk(tables, i);
      EXPECT_EQ(end.cycle_length, 2u);
      const auto& root = basins.roots[basins.labels[i]];
      EXPECT_EQ(d1.shape().linear_index(root.first), end.first);
      EXPECT_EQ(d2.shape().linear_index(root.second), end.second);
    }
  }
}

TEST(Basins, LongerCycleRootIsSmallestImageOnePixel) {
  // A 4-node cycle: 0 -> 0' -> 1 -> 1' -> 0 with 1-d... built directly on tables.
  NeighborTables tables;
  tables.shape1 = {1, 3};
  tables.shape2 = {1, 2};
  tables.forward = {0, 1, 1};
  tables.backward = {1, 0};
  const auto basins = ComputeBasins(tables);
  ASSERT_EQ(basins.basin_count(), 1u);
  EXPECT_EQ(basins.cycle_lengths[0], 4u);
  EXPECT_EQ(basins.sizes[0], 3u);
  EXPECT_EQ(basins.roots[0].first, (PixelCoord{0, 0}));
  EXPECT_EQ(basins.roots[0].second, (PixelCoord{0, 0}));
}

TEST(Basins, MonotoneSimilarityAlongWalks) {
  const auto [d1, d2] = GenerateRandomGrids(20, 20, 24, 95);
  const auto tables = OracleNeighborTables(d1, d2);
  auto dot = [](std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += static_cast<double>(a[c]) * b[c];
    return s;
  };
  for (std::size_t start = 0; start < d1.pixel_count(); ++start) {
    std::size_t i = start;
    double previous = -2.0;
    for (int step = 0; step < 8; ++step) {
      const std::size_t j = tables.forward[i];
      const double forward = dot(d1.descriptor(i), d2.descriptor(j));
      EXPECT_GE(forward, previous - 1e-6);
      const std::size_t next = tables.backward[j];
      const double backward = dot(d1.descriptor(next), d2.descriptor(j));
      EXPECT_GE(backward, forward - 1e-6);
      previous = backward;
      i = next;
    }
  }
}

TEST(Subsample, SaturationReturnsFullSet) {
  const auto [d1, d2] = GenerateRandomGrids(12, 12, 24, 100);
  const auto full = FullReciprocalMatches(d1, d2);
  const auto basins = ComputeBasins(d1, d2);
  EXPECT_EQ(BasinBiasedSubsample(full, basins, full.size(), 1), full);
  EXPECT_EQ(BasinBiasedSubsample(full, basins, full.size() + 10, 1), full);
  EXPECT_EQ(NaiveSubsample(full, full.size(), 1), full);
}

TEST(Subsample, SizesDeterminismAndMembership) {
  const auto [d1, d2] = GenerateRandomGrids(16, 16, 24, 101);
  const auto full = FullReciprocalMatches(d1, d2);
  const auto basins = ComputeBasins(d1, d2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto biased = BasinBiasedSubsample(full, basins, 10, seed);
    const auto naive = NaiveSubsample(full, 10, seed);
    EXPECT_EQ(biased.size(), 10u);
    EXPECT_EQ(naive.size(), 10u);
    EXPECT_EQ(biased, BasinBiasedSubsample(full, basins, 10, seed));
    EXPECT_EQ(naive, NaiveSubsample(full, 10, seed));
    for (const auto& c : biased) EXPECT_TRUE(full.contains(c.first, c.second));
    for (const auto& c : naive) EXPECT_TRUE(full.contains(c.first, c.second));
  }
}

TEST(Subsample, RejectsPairsThatAreNotRoots) {
  const auto [d1, d2] = GenerateRandomGrids(8, 8, 24, 102);
  const auto basins = ComputeBasins(d1, d2);
  const auto full = FullReciprocalMatches(d1, d2);
  std::vector<Correspondence> pairs(full.begin(), full.end());
  // Pair a root's image-1 pixel with a different image-2 pixel.
  pairs[0].second.u = (pairs[0].second.u + 1) % 8;
  std::vector<Correspondence> bad{pairs[0]};
  EXPECT_RECIMATCH_ERROR(BasinBiasedSubsample(CorrespondenceSet(bad), basins, 1, 0), ErrorCode::kInvalidArgument);
}

// Basin map with one basin of size 99 and one of size 1.
BasinMap TwoBasins() {
  NeighborTables tables;
  tables.shape1 = {10, 10};
  tables.shape2 = {1, 2};
  tables.forward.assign(100, 0);
  tables.forward[99] = 1;
  tables.backward = {0, 99};
  return ComputeBasins(tables);
}

TEST(Subsample, BiasFollowsBasinSize) {
  const auto basins = TwoBasins();
  ASSERT_EQ(basins.basin_count(), 2u);
  const CorrespondenceSet full({basins.roots[0], basins.roots[1]});
  const std::size_t trials = 20000;
  std::size_t large = 0;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    const auto picked = BasinBiasedSubsample(full, basins, 1, seed);
    if (picked[0] == basins.roots[0]) ++large;
  }
  // 0.99 expected; 5 standard deviations is about 0.0035.
  EXPECT_NEAR(static_cast<double>(large) / trials, 0.99, 0.0035);
}

TEST(Subsample, UniformBasinsMatchUniformSampling) {
  // Identity grids have equal basin sizes, so biased sampling is uniform.
  const auto grid = OneHotGrid(2, 3);
  const auto basins = ComputeBasins(grid, grid);
  const auto full = FullReciprocalMatches(grid, grid);
  std::vector<std::size_t> biased(6, 0);
  std::vector<std::size_t> naive(6, 0);
  const std::size_t trials = 30000;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    for (const auto& c : BasinBiasedSubsample(full, basins, 2, seed)) ++biased[grid.shape().linear_index(c.first)];
    for (const auto& c : NaiveSubsample(full, 2, seed)) ++naive[grid.shape().linear_index(c.first)];
  }
  // Each pair appears with probability 1/3; compare both against it with a
  // chi-square bound (5 dof, p ~ 1e-4 at 25.7).
  auto chi2 = [&](const std::vector<std::size_t>& counts) {
    const double expected = trials * 2.0 / 6.0;
    double s = 0.0;
    for (auto c : counts) s += (c - expected) * (c - expected) / expected;
    return s;
  };
  EXPECT_LT(chi2(biased), 25.7);
  EXPECT_LT(chi2(naive), 25.7);
}

TEST(Subsample, NaiveIsUniform) {
  std::vector<Correspondence> pairs;
  for (std::uint32_t i = 0; i < 10; ++i) pairs.push_back({{i, 0}, {i, 0}});
  const CorrespondenceSet full(pairs);
  std::vector<std::size_t> counts(10, 0);
  const std::size_t trials = 20000;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    for (const auto& c : NaiveSubsample(full, 3, seed)) ++counts[c.first.u];
  }
  const double expected = trials * 0.3;
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 33.7);  // 9 dof, p ~ 1e-4
}

}  // namespace
}  // namespace recimatch
