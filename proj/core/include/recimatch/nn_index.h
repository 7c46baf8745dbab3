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
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "recimatch/grids.h"

namespace recimatch {

enum class NNBackend { kBruteForce, kKdTree };

std::string_view BackendName(NNBackend backend);

// kd-trees degrade to a linear scan in high dimension; larger d must use the
// brute-force backend.
inline constexpr std::uint32_t kMaxKdTreeDim = 8;

// Squared L2 distance: per-channel differences in binary32, squares summed in
// binary64 in channel order. Every backend ranks candidates with this value.
double SquaredDistance(std::span<const float> a, std::span<const float> b);

// Exact nearest-neighbor index over the pixels of a grid. Queries return the
// pixel minimizing SquaredDistance; ties go to the smallest linear index
// v*W+u. Immutable once built and safe for concurrent queries.
class NNIndex {
 public:
  static NNIndex Build(const DescriptorGrid& grid, NNBackend backend);
  // Indexes only the valid pixels of the pointmap.
  static NNIndex Build(const PointMap& map, NNBackend backend);

  NNBackend backend() const;
  std::uint32_t dim() const;
  GridShape shape() const;
  // Number of indexed pixels.
  std::size_t size() const;

  PixelCoord Query(std::span<const float> x) const;
  // xs holds n query vectors back to back. Output order follows input order
  // and does not depend on the thread count.
  std::vector<PixelCoord> BatchQuery(std::span<const float> xs) const;

  // Same as the above, returning linear pixel indices in the source grid.
  std::uint32_t QueryLinear(std::span<const float> x) const;
  std::vector<std::uint32_t> BatchQueryLinear(std::span<const float> xs) const;

 private:
  struct Impl;
  explicit NNIndex(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

}  // namespace recimatch
