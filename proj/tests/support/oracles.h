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
#include <filesystem>
#include <string>
#include <vector>

#include "recimatch/grids.h"

namespace recimatch::testing {

// Nearest neighbor by exhaustive scan with double-precision differences,
// ties to the smallest linear index.
std::size_t OracleNearest(const DescriptorGrid& grid, std::span<const float> query);

// Same, as the largest dot product.
std::size_t OracleMaxDot(const DescriptorGrid& grid, std::span<const float> query);

struct OracleTables {
  std::vector<std::size_t> forward;   // image-1 pixel -> nearest image-2 pixel
  std::vector<std::size_t> backward;  // image-2 pixel -> nearest image-1 pixel
};

OracleTables OracleNeighborTables(const DescriptorGrid& d1, const DescriptorGrid& d2);

// Every (i, j) with j = NN2(i) and i = NN1(j), sorted.
CorrespondenceSet OracleReciprocal(const DescriptorGrid& d1, const DescriptorGrid& d2);
CorrespondenceSet OracleReciprocal(const OracleTables& tables, GridShape shape1, GridShape shape2);

// Follows i -> NN2(i) -> NN1(...) from image-1 pixel `start` until the walk
// revisits an image-1 pixel; returns the reciprocal pair it settles on and
// the length of the terminal cycle in graph nodes (2 for a reciprocal pair).
struct WalkEnd {
  std::size_t first = 0;
  std::size_t second = 0;
  std::size_t cycle_length = 0;
};
WalkEnd OracleWalk(const OracleTables& tables, std::size_t start);

// Bidirectional InfoNCE, written out term by term.
double OracleInfoNce(const DescriptorGrid& d1, const DescriptorGrid& d2, const CorrespondenceSet& pairs, double tau);

DescriptorGrid MakeGrid(std::uint32_t height, std::uint32_t width, std::uint32_t dim, std::vector<float> data);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace recimatch::testing
