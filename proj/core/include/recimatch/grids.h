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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace recimatch {

// Pixel position: u is the column, v the row, both 0-based.
struct PixelCoord {
  std::uint32_t u = 0;
  std::uint32_t v = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

inline std::uint64_t PixelKey(PixelCoord p) {
  return (static_cast<std::uint64_t>(p.v) << 32) | p.u;
}

struct GridShape {
  std::uint32_t height = 0;
  std::uint32_t width = 0;

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
  bool contains(PixelCoord p) const { return p.u < width && p.v < height; }
  std::size_t linear_index(PixelCoord p) const { return static_cast<std::size_t>(p.v) * width + p.u; }
  PixelCoord pixel(std::size_t linear) const {
    return {static_cast<std::uint32_t>(linear % width), static_cast<std::uint32_t>(linear / width)};
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// Tolerance on per-pixel L2 norms accepted for grids flagged as normalized.
inline constexpr double kNormalizedTolerance = 1e-4;

// Dense H x W field of d-dimensional descriptors, row-major with the channels
// of one pixel contiguous.
class DescriptorGrid {
 public:
  DescriptorGrid(std::uint32_t height, std::uint32_t width, std::uint32_t dim, std::vector<float> data,
                 bool normalized);

  std::uint32_t height() const { return shape_.height; }
  std::uint32_t width() const { return shape_.width; }
  std::uint32_t dim() const { return dim_; }
  GridShape shape() const { return shape_; }
  std::size_t pixel_count() const { return shape_.pixel_count(); }
  bool normalized() const { return normalized_; }

  std::span<const float> data() const { return data_; }
  std::span<const float> descriptor(std::size_t linear) const {
    return std::span<const float>(data_).subspan(linear * dim_, dim_);
  }
  std::span<const float> descriptor(PixelCoord p) const { return descriptor(shape_.linear_index(p)); }

  friend bool operator==(const DescriptorGrid&, const DescriptorGrid&) = default;

 private:
  GridShape shape_;
  std::uint32_t dim_;
  std::vector<float> data_;
  bool normalized_;
};

// Scales every descriptor to unit L2 norm. Throws kZeroNorm naming the first
// all-zero pixel.
DescriptorGrid NormalizeDescriptors(const DescriptorGrid& grid);

// Dense per-pixel 3D points with a validity mask. Points must be finite where
// valid; invalid entries are carried but ignored.
class PointMap {
 public:
  PointMap(std::uint32_t height, std::uint32_t width, std::vector<float> points, std::vector<std::uint8_t> valid);

  std::uint32_t height() const { return shape_.height; }
  std::uint32_t width() const { return shape_.width; }
  GridShape shape() const { return shape_; }
  std::size_t pixel_count() const { return shape_.pixel_count(); }

  std::span<const float> points() const { return points_; }
  std::span<const std::uint8_t> valid_mask() const { return valid_; }
  bool valid(std::size_t linear) const { return valid_[linear] != 0; }
  std::array<float, 3> point(std::size_t linear) const {
    return {points_[3 * linear], points_[3 * linear + 1], points_[3 * linear + 2]};
  }
  std::size_t valid_count() const;

  friend bool operator==(const PointMap&, const PointMap&) = default;

 private:
  GridShape shape_;
  std::vector<float> points_;
  std::vector<std::uint8_t> valid_;
};

// Strictly positive per-pixel confidences.
class ConfidenceMap {
 public:
  ConfidenceMap(std::uint32_t height, std::uint32_t width, std::vector<float> values);

  std::uint32_t height() const { return shape_.height; }
  std::uint32_t width() const { return shape_.width; }
  GridShape shape() const { return shape_; }
  std::span<const float> values() const { return values_; }

  friend bool operator==(const ConfidenceMap&, const ConfidenceMap&) = default;

 private:
  GridShape shape_;
  std::vector<float> values_;
};

struct Correspondence {
  PixelCoord first;   // pixel in grid 1
  PixelCoord second;  // pixel in grid 2
  bool false_padding = false;

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

// Partial bijection between the pixels of two grids. Pairs flagged as false
// padding (training filler) are exempt from the bijection check.
class CorrespondenceSet {
 public:
  CorrespondenceSet() = default;
  explicit CorrespondenceSet(std::vector<Correspondence> pairs);

  std::span<const Correspondence> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }
  const Correspondence& operator[](std::size_t i) const { return pairs_[i]; }

  std::size_t true_count() const;
  std::size_t padding_count() const { return size() - true_count(); }
  bool has_padding() const { return padding_count() > 0; }
  bool contains(PixelCoord first, PixelCoord second) const;

  // Throws kOutOfBounds if any pixel falls outside the given grids.
  void CheckBounds(GridShape shape1, GridShape shape2) const;

  // Same pairs ordered by (first.v, first.u, second.v, second.u).
  CorrespondenceSet Sorted() const;

  friend bool operator==(const CorrespondenceSet&, const CorrespondenceSet&) = default;

 private:
  std::vector<Correspondence> pairs_;
};

bool PairLess(const Correspondence& a, const Correspondence& b);

}  // namespace recimatch
