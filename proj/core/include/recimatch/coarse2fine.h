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
#include <string>
#include <vector>

#include "recimatch/grids.h"
#include "recimatch/matcher.h"

namespace recimatch {

inline constexpr std::uint32_t kWindowSize = 512;
inline constexpr double kWindowOverlap = 0.5;
inline constexpr double kDefaultCoverage = 0.9;

// Half-open pixel rectangle [x0, x1) x [y0, y1) in full-resolution coordinates.
struct Window {
  std::uint32_t x0 = 0;
  std::uint32_t y0 = 0;
  std::uint32_t x1 = 0;
  std::uint32_t y1 = 0;

  std::uint32_t width() const { return x1 - x0; }
  std::uint32_t height() const { return y1 - y0; }
  bool contains(PixelCoord p) const { return p.u >= x0 && p.u < x1 && p.v >= y0 && p.v < y1; }
  std::string ToString() const;

  friend bool operator==(const Window&, const Window&) = default;
};

struct Resolution {
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// Per-axis side min(target, extent), stride side*(1-overlap), last window
// flush with the image edge. Row-major order (y outer).
std::vector<Window> MakeWindowGrid(std::uint32_t width, std::uint32_t height, std::uint32_t target = kWindowSize,
                                   double overlap = kWindowOverlap);

// Coarse-to-full multiplier per axis.
struct Scale {
  double x = 1.0;
  double y = 1.0;
};

PixelCoord UpscalePixel(PixelCoord p, Scale scale);

struct WindowPair {
  std::size_t index1 = 0;
  std::size_t index2 = 0;
  Window w1;
  Window w2;
  // Upscaled coarse matches inside the pair, and how many of those were not
  // yet covered when the pair was picked.
  std::size_t covered = 0;
  std::size_t gain = 0;
};

struct WindowSelection {
  std::vector<WindowPair> pairs;
  std::size_t total = 0;
  std::size_t covered = 0;

  double covered_fraction() const { return total == 0 ? 0.0 : static_cast<double>(covered) / total; }
};

// Greedy cover: repeatedly adds the pair covering the most uncovered upscaled
// coarse matches (ties to the lowest (index1, index2)) until the covered
// fraction reaches `coverage` or no pair adds anything.
WindowSelection SelectWindowPairs(const std::vector<Window>& windows1, const std::vector<Window>& windows2,
                                  const CorrespondenceSet& coarse, Scale scale1, Scale scale2,
                                  double coverage = kDefaultCoverage);

// Rescales crop-resolution matches into full-resolution image coordinates,
// rounding to the nearest pixel. Pairs that collide after rounding keep the
// first occurrence.
CorrespondenceSet MapToOriginal(const CorrespondenceSet& matches, const Window& w1, const Window& w2,
                                Resolution crop1, Resolution crop2);

// Source of descriptor grids for image crops. image is 0 or 1; the returned
// grid's shape is the crop's working resolution and may differ from the
// requested one.
class DescriptorProvider {
 public:
  virtual ~DescriptorProvider() = default;
  virtual DescriptorGrid Descriptors(int image, const Window& window, Resolution working) const = 0;
};

// Largest side scaled to `target` with preserved aspect; never upscales.
Resolution CoarseResolution(Resolution full, std::uint32_t target = kWindowSize);

struct CoarseToFineOptions {
  std::size_t k = kDefaultSeedCount;
  std::size_t max_iters = kDefaultMaxIterations;
  double coverage = kDefaultCoverage;
  std::uint32_t window_size = kWindowSize;
  double overlap = kWindowOverlap;
  std::uint32_t coarse_size = kWindowSize;
};

struct CoarseToFineResult {
  CorrespondenceSet matches;          // full resolution
  CorrespondenceSet coarse;           // coarse resolution
  CorrespondenceSet coarse_upscaled;  // coarse matches mapped to full resolution
  WindowSelection selection;
  Resolution coarse_resolution1;
  Resolution coarse_resolution2;
};

CoarseToFineResult CoarseToFineMatch(const DescriptorProvider& provider, Resolution size1, Resolution size2,
                                     const CoarseToFineOptions& options = {});

// Same, over caller-supplied window lists.
CoarseToFineResult CoarseToFineMatch(const DescriptorProvider& provider, Resolution size1, Resolution size2,
                                     const std::vector<Window>& windows1, const std::vector<Window>& windows2,
                                     const CoarseToFineOptions& options = {});

}  // namespace recimatch
