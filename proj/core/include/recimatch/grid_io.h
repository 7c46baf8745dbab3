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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "recimatch/grids.h"

// On-disk formats. All integers and floats are little-endian; floats are
// IEEE-754 binary32.
//
//   DGRD  "DGRD" u32 version=1, u32 H, u32 W, u32 D, u32 flags (bit0 = normalized),
//         then H*W*D f32, pixel-major then channel.
//   PMAP  "PMAP" u32 version=1, u32 H, u32 W, then H*W*3 f32, then H*W u8 validity (0/1).
//   CONF  "CONF" u32 version=1, u32 H, u32 W, then H*W f32.
//   CORR  "CORR" u64 count, then count x (u32 u1, u32 v1, u32 u2, u32 v2).
//   BLBL  "BLBL" u32 version=1, u32 H, u32 W, then H*W u32 labels.
//
// Correspondences also have a text form: one "u1 v1 u2 v2 [flag]" line per
// pair, '#' starts a comment, flag 1 marks false padding.

namespace recimatch {

inline constexpr std::uint32_t kFormatVersion = 1;

DescriptorGrid LoadDescriptorGrid(const std::filesystem::path& path);
void SaveDescriptorGrid(const DescriptorGrid& grid, const std::filesystem::path& path);

PointMap LoadPointMap(const std::filesystem::path& path);
void SavePointMap(const PointMap& map, const std::filesystem::path& path);

ConfidenceMap LoadConfidenceMap(const std::filesystem::path& path);
void SaveConfidenceMap(const ConfidenceMap& map, const std::filesystem::path& path);

// Detects binary ("CORR" magic) or text form.
CorrespondenceSet LoadCorrespondences(const std::filesystem::path& path);
void SaveCorrespondencesText(const CorrespondenceSet& set, const std::filesystem::path& path);
// The binary form has no flag column, so sets carrying padding are refused.
void SaveCorrespondencesBinary(const CorrespondenceSet& set, const std::filesystem::path& path);
// Binary when the extension is ".corr", text otherwise.
void SaveCorrespondences(const CorrespondenceSet& set, const std::filesystem::path& path);

struct LabelGrid {
  GridShape shape;
  std::vector<std::uint32_t> labels;

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;
};

LabelGrid LoadLabelGrid(const std::filesystem::path& path);
void SaveLabelGrid(const LabelGrid& grid, const std::filesystem::path& path);

}  // namespace recimatch
