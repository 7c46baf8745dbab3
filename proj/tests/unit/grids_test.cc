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


#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "recimatch/grids.h"
#include "recimatch/synth.h"
#include "support/expect_error.h"
#include "support/oracles.h"

namespace recimatch {
namespace {

using testing::MakeGrid;
using testing::OracleMaxDot;

TEST(DescriptorGrid, RejectsEmptyAndMisshapen) {
  EXPECT_RECIMATCH_ERROR(DescriptorGrid(0, 0, 3, {}, false), ErrorCode::kEmptyGrid);
  EXPECT_RECIMATCH_ERROR(DescriptorGrid(2, 0, 3, {}, false), ErrorCode::kEmptyGrid);
  EXPECT_RECIMATCH_ERROR(DescriptorGrid(1, 1, 0, {}, false), ErrorCode::kInvalidArgument);
  EXPECT_RECIMATCH_ERROR(DescriptorGrid(1, 2, 3, {1, 2, 3}, false), ErrorCode::kShapeMismatch);
}

TEST(DescriptorGrid, NormalizedFlagIsChecked) {
  EXPECT_RECIMATCH_ERROR(DescriptorGrid(1, 1, 2, {3, 4}, true), ErrorCode::kNotNormalized);
  EXPECT_NO_THROW(DescriptorGrid(1, 1, 2, {0.6f, 0.8f}, true));
  // Within 1e-4 of unit norm is accepted.
  EXPECT_NO_THROW(DescriptorGrid(1, 1, 2, {0.60003f, 0.8f}, true));
}

TEST(DescriptorGrid, PixelAccess) {
  const DescriptorGrid grid(2, 3, 2, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, false);
  EXPECT_EQ(grid.pixel_count(), 6u);
  EXPECT_EQ(grid.descriptor(PixelCoord{2, 0})[0], 4.0f);
  EXPECT_EQ(grid.descriptor(PixelCoord{0, 1})[1], 7.0f);
  EXPECT_EQ(grid.shape().linear_index(PixelCoord{1, 1}), 4u);
  EXPECT_EQ(grid.shape().pixel(5), (PixelCoord{2, 1}));
}

TEST(NormalizeDescriptors, ThreeFourFive) {
  const auto grid = NormalizeDescriptors(DescriptorGrid(1, 1, 2, {3, 4}, false));
  EXPECT_TRUE(grid.normalized());
  EXPECT_NEAR(grid.descriptor(0)[0], 0.6, 1e-7);
  EXPECT_NEAR(grid.descriptor(0)[1], 0.8, 1e-7);
}

TEST(NormalizeDescriptors, ZeroNormNamesPixel) {
  const DescriptorGrid grid(2, 2, 2, {1, 0, 0, 0, 0, 1, 1, 1}, false);
  const auto caught = testing::Catch([&] { NormalizeDescriptors(grid); });
  ASSERT_TRUE(caught);
  EXPECT_EQ(caught->code, ErrorCode::kZeroNorm);
  EXPECT_NE(caught->message.find("(1,0)"), std::string::npos) << caught->message;
}

TEST(NormalizeDescriptors, NonFiniteRejected) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  EXPECT_RECIMATCH_ERROR(NormalizeDescriptors(DescriptorGrid(1, 1, 2, {nan, 1}, false)), ErrorCode::kNonFinite);
}

TEST(NormalizeDescriptors, UnitNormAndIdempotent) {
  std::mt19937_64 rng(7);
  std::normal_distribution<float> normal;
  std::vector<float> data(8 * 8 * 24);
  for (float& x : data) x = normal(rng) * 10.0f;
  const auto once = MakeGrid(8, 8, 24, data);
  for (std::size_t i = 0; i < once.pixel_count(); ++i) {
    double sq = 0.0;
    for (float x : once.descriptor(i)) sq += static_cast<double>(x) * x;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
  }
  const auto twice = NormalizeDescriptors(once);
  for (std::size_t i = 0; i < once.data().size(); ++i) EXPECT_NEAR(twice.data()[i], once.data()[i], 1e-6);
}

TEST(NormalizeDescriptors, PreservesDotProductArgmax) {
  // Normalizing a grid of equal-norm vectors must not change which pixel best
  // matches a query; with unequal norms it may, so scale every row equally.
  std::mt19937_64 rng(11);
  std::normal_distribution<float> normal;
  auto [unit, unused] = GenerateRandomGrids(6, 6, 16, 3);
  std::vector<float> scaled(unit.data().begin(), unit.data().end());
  for (float& x : scaled) x *= 3.5f;
  const DescriptorGrid raw(6, 6, 16, scaled, false);
  const auto normalized = NormalizeDescriptors(raw);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<float> q(16);
    for (float& x : q) x = normal(rng);
    EXPECT_EQ(OracleMaxDot(raw, q), OracleMaxDot(normalized, q));
  }
}

TEST(PointMap, Validation) {
  const float inf = std::numeric_limits<float>::infinity();
  EXPECT_NO_THROW(PointMap(1, 2, {0, 0, 1, inf, 0, 0}, {1, 0}));
  EXPECT_RECIMATCH_ERROR(PointMap(1, 2, {0, 0, 1, inf, 0, 0}, {1, 1}), ErrorCode::kNonFinite);
  EXPECT_RECIMATCH_ERROR(PointMap(1, 2, {0, 0, 1, 0, 0, 1}, {1, 2}), ErrorCode::kInvalidArgument);
  EXPECT_RECIMATCH_ERROR(PointMap(1, 2, {0, 0, 1}, {1, 1}), ErrorCode::kShapeMismatch);
  EXPECT_RECIMATCH_ERROR(PointMap(0, 2, {}, {}), ErrorCode::kEmptyGrid);
  EXPECT_EQ(PointMap(1, 2, {0, 0, 1, 0, 0, 2}, {0, 1}).valid_count(), 1u);
}

TEST(ConfidenceMap, MustBePositive) {
  EXPECT_NO_THROW(ConfidenceMap(1, 2, {0.5f, 3.0f}));
  EXPECT_RECIMATCH_ERROR(ConfidenceMap(1, 2, {0.0f, 1.0f}), ErrorCode::kInvalidArgument);
  EXPECT_RECIMATCH_ERROR(ConfidenceMap(1, 2, {-1.0f, 1.0f}), ErrorCode::kInvalidArgument);
  EXPECT_RECIMATCH_ERROR(ConfidenceMap(1, 2, {std::nanf(""), 1.0f}), ErrorCode::kNonFinite);
  EXPECT_RECIMATCH_ERROR(ConfidenceMap(1, 2, {1.0f}), ErrorCode::kShapeMismatch);
}

TEST(CorrespondenceSet, PartialBijection) {
  EXPECT_NO_THROW(CorrespondenceSet({{{0, 0}, {1, 1}}, {{1, 0}, {0, 1}}}));
  EXPECT_RECIMATCH_ERROR(CorrespondenceSet({{{0, 0}, {1, 1}}, {{0, 0}, {0, 1}}}), ErrorCode::kDuplicatePixel);
  EXPECT_RECIMATCH_ERROR(CorrespondenceSet({{{0, 0}, {1, 1}}, {{1, 0}, {1, 1}}}), ErrorCode::kDuplicatePixel);
}

TEST(CorrespondenceSet, PaddingIsExemptFromBijection) {
  const CorrespondenceSet set({{{0, 0}, {1, 1}}, {{0, 0}, {2, 2}, true}, {{3, 3}, {1, 1}, true}});
  EXPECT_EQ(set.true_count(), 1u);
  EXPECT_EQ(set.padding_count(), 2u);
  EXPECT_TRUE(set.has_padding());
  EXPECT_RECIMATCH_ERROR(CorrespondenceSet({{{0, 0}, {1, 1}}, {{0, 0}, {2, 2}}, {{3, 3}, {4, 4}, true}}),
                         ErrorCode::kDuplicatePixel);
}

TEST(CorrespondenceSet, BoundsContainsAndSorting) {
  const CorrespondenceSet set({{{2, 1}, {0, 0}}, {{0, 1}, {1, 0}}, {{1, 0}, {2, 1}}});
  EXPECT_TRUE(set.contains({0, 1}, {1, 0}));
  EXPECT_FALSE(set.contains({0, 1}, {0, 0}));
  EXPECT_NO_THROW(set.CheckBounds({2, 3}, {2, 3}));
  EXPECT_RECIMATCH_ERROR(set.CheckBounds({2, 2}, {2, 3}), ErrorCode::kOutOfBounds);
  const auto sorted = set.Sorted();
  ASSERT_EQ(sorted.size(), 3u);
  EXPECT_EQ(sorted[0].first, (PixelCoord{1, 0}));
  EXPECT_EQ(sorted[1].first, (PixelCoord{0, 1}));
  EXPECT_EQ(sorted[2].first, (PixelCoord{2, 1}));
}

}  // namespace
}  // namespace recimatch
