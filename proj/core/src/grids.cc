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

#include "recimatch/grids.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>

#include "recimatch/error.h"

namespace recimatch {
namespace {

std::string PixelName(GridShape shape, std::size_t linear) {
  const PixelCoord p = shape.pixel(linear);
  return "(" + std::to_string(p.u) + "," + std::to_string(p.v) + ")";
}

void CheckNonEmpty(std::uint32_t height, std::uint32_t width, const char* what) {
  if (height == 0 || width == 0) {
    throw Error(ErrorCode::kEmptyGrid, std::string(what) + " must have at least one pixel");
  }
}

}  // namespace

DescriptorGrid::DescriptorGrid(std::uint32_t height, std::uint32_t width, std::uint32_t dim,
                               std::vector<float> data, bool normalized)
    : shape_{height, width}, dim_(dim), data_(std::move(data)), normalized_(normalized) {
  CheckNonEmpty(height, width, "descriptor grid");
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "descriptor dimension must be >= 1");
  if (data_.size() != shape_.pixel_count() * dim_) {
    throw Error(ErrorCode::kShapeMismatch, "descriptor data length " + std::to_string(data_.size()) +
                                               " != H*W*d = " + std::to_string(shape_.pixel_count() * dim_));
  }
  if (normalized_) {
    for (std::size_t i = 0; i < shape_.pixel_count(); ++i) {
      double sq = 0.0;
      for (float x : descriptor(i)) sq += static_cast<double>(x) * x;
      const double norm = std::sqrt(sq);
      if (!(std::abs(norm - 1.0) <= kNormalizedTolerance)) {
        throw Error(ErrorCode::kNotNormalized,
                    "descriptor at pixel " + PixelName(shape_, i) + " has norm " + std::to_string(norm));
      }
    }
  }
}

DescriptorGrid NormalizeDescriptors(const DescriptorGrid& grid) {
  std::vector<float> out(grid.data().begin(), grid.data().end());
  const std::size_t d = grid.dim();
  for (std::size_t i = 0; i < grid.pixel_count(); ++i) {
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) sq += static_cast<double>(out[i * d + c]) * out[i * d + c];
    if (!std::isfinite(sq)) {
      throw Error(ErrorCode::kNonFinite, "descriptor at pixel " + PixelName(grid.shape(), i) + " is not finite");
    }
    if (sq == 0.0) {
      throw Error(ErrorCode::kZeroNorm, "descriptor at pixel " + PixelName(grid.shape(), i) + " has zero norm");
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t c = 0; c < d; ++c) out[i * d + c] = static_cast<float>(out[i * d + c] * inv);
  }
  return DescriptorGrid(grid.height(), grid.width(), grid.dim(), std::move(out), true);
}

PointMap::PointMap(std::uint32_t height, std::uint32_t width, std::vector<float> points,
                   std::vector<std::uint8_t> valid)
    : shape_{height, width}, points_(std::move(points)), valid_(std::move(valid)) {
  CheckNonEmpty(height, width, "pointmap");
  if (points_.size() != 3 * shape_.pixel_count() || valid_.size() != shape_.pixel_count()) {
    throw Error(ErrorCode::kShapeMismatch, "pointmap buffers do not match H*W");
  }
  for (std::size_t i = 0; i < shape_.pixel_count(); ++i) {
    if (valid_[i] > 1) throw Error(ErrorCode::kInvalidArgument, "validity mask entries must be 0 or 1");
    if (!valid_[i]) continue;
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(points_[3 * i + c])) {
        throw Error(ErrorCode::kNonFinite, "valid point at pixel " + PixelName(shape_, i) + " is not finite");
      }
    }
  }
}

std::size_t PointMap::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

ConfidenceMap::ConfidenceMap(std::uint32_t height, std::uint32_t width, std::vector<float> values)
    : shape_{height, width}, values_(std::move(values)) {
  CheckNonEmpty(height, width, "confidence map");
  if (values_.size() != shape_.pixel_count()) {
    throw Error(ErrorCode::kShapeMismatch, "confidence buffer does not match H*W");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kNonFinite, "confidence at pixel " + PixelName(shape_, i) + " is not finite");
    }
    if (!(values_[i] > 0.0f)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "confidence at pixel " + PixelName(shape_, i) + " must be > 0, got " + std::to_string(values_[i]));
    }
  }
}

CorrespondenceSet::CorrespondenceSet(std::vector<Correspondence> pairs) : pairs_(std::move(pairs)) {
  std::unordered_set<std::uint64_t> seen1;
  std::unordered_set<std::uint64_t> seen2;
  for (const auto& c : pairs_) {
    if (c.false_padding) continue;
    if (!seen1.insert(PixelKey(c.first)).second) {
      throw Error(ErrorCode::kDuplicatePixel, "grid-1 pixel (" + std::to_string(c.first.u) + "," +
                                                  std::to_string(c.first.v) + ") appears in more than one pair");
    }
    if (!seen2.insert(PixelKey(c.second)).second) {
      throw Error(ErrorCode::kDuplicatePixel, "grid-2 pixel (" + std::to_string(c.second.u) + "," +
                                                  std::to_string(c.second.v) + ") appears in more than one pair");
    }
  }
}

std::size_t CorrespondenceSet::true_count() const {
  return static_cast<std::size_t>(
      std::count_if(pairs_.begin(), pairs_.end(), [](const Correspondence& c) { return !c.false_padding; }));
}

bool CorrespondenceSet::contains(PixelCoord first, PixelCoord second) const {
  return std::any_of(pairs_.begin(), pairs_.end(),
                     [&](const Correspondence& c) { return c.first == first && c.second == second; });
}

void CorrespondenceSet::CheckBounds(GridShape shape1, GridShape shape2) const {
  for (const auto& c : pairs_) {
    if (!shape1.contains(c.first) || !shape2.contains(c.second)) {
      throw Error(ErrorCode::kOutOfBounds, "pair (" + std::to_string(c.first.u) + "," + std::to_string(c.first.v) +
                                               ")-(" + std::to_string(c.second.u) + "," +
                                               std::to_string(c.second.v) + ") lies outside the grids");
    }
  }
}

bool PairLess(const Correspondence& a, const Correspondence& b) {
  auto key = [](const Correspondence& c) {
    return std::make_tuple(c.first.v, c.first.u, c.second.v, c.second.u, c.false_padding);
  };
  return key(a) < key(b);
}

CorrespondenceSet CorrespondenceSet::Sorted() const {
  std::vector<Correspondence> sorted = pairs_;
  std::sort(sorted.begin(), sorted.end(), PairLess);
  CorrespondenceSet out;
  out.pairs_ = std::move(sorted);
  return out;
}

}  // namespace recimatch
