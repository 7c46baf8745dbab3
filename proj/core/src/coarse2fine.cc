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

#include "recimatch/coarse2fine.h"

#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_set>

#include "recimatch/error.h"

namespace recimatch {
namespace {

std::vector<std::uint32_t> AxisPositions(std::uint32_t extent, std::uint32_t side, std::uint32_t stride) {
  std::vector<std::uint32_t> positions{0};
  while (positions.back() + side < extent) {
    std::uint32_t next = positions.back() + stride;
    if (next + side > extent) next = extent - side;
    positions.push_back(next);
  }
  return positions;
}

std::uint32_t RoundScaled(std::uint32_t x, double scale, std::uint32_t limit) {
  const double scaled = std::round(static_cast<double>(x) * scale);
  return static_cast<std::uint32_t>(std::clamp(scaled, 0.0, static_cast<double>(limit - 1)));
}

void CheckWindow(const Window& w, Resolution size, const char* which) {
  if (w.x0 >= w.x1 || w.y0 >= w.y1 || w.x1 > size.width || w.y1 > size.height) {
    throw Error(ErrorCode::kOutOfBounds, std::string(which) + " window " + w.ToString() + " is empty or exceeds " +
                                             std::to_string(size.width) + "x" + std::to_string(size.height));
  }
}

DescriptorGrid Fetch(const DescriptorProvider& provider, int image, const Window& window, Resolution working) {
  try {
    return provider.Descriptors(image, window, working);
  } catch (const Error& e) {
    throw Error(e.code(), "image " + std::to_string(image + 1) + " window " + window.ToString() + ": " + e.what());
  }
}

// Appends pairs, dropping any whose grid-1 or grid-2 pixel is already used.
class BijectiveMerger {
 public:
  void Add(std::span<const Correspondence> pairs) {
    for (const auto& c : pairs) {
      if (used1_.count(PixelKey(c.first)) || used2_.count(PixelKey(c.second))) continue;
      used1_.insert(PixelKey(c.first));
      used2_.insert(PixelKey(c.second));
      pairs_.push_back(c);
    }
  }
  std::vector<Correspondence> Take() { return std::move(pairs_); }

 private:
  std::unordered_set<std::uint64_t> used1_;
  std::unordered_set<std::uint64_t> used2_;
  std::vector<Correspondence> pairs_;
};

}  // namespace

std::string Window::ToString() const {
  return "[" + std::to_string(x0) + "," + std::to_string(y0) + "," + std::to_string(x1) + "," + std::to_string(y1) +
         "]";
}

std::vector<Window> MakeWindowGrid(std::uint32_t width, std::uint32_t height, std::uint32_t target, double overlap) {
  if (width == 0 || height == 0) throw Error(ErrorCode::kEmptyGrid, "window grid needs a non-empty image");
  if (target == 0) throw Error(ErrorCode::kInvalidArgument, "window target size must be >= 1");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::kInvalidArgument, "overlap must lie in [0, 1)");

  const std::uint32_t side_x = std::min(target, width);
  const std::uint32_t side_y = std::min(target, height);
  auto stride_for = [&](std::uint32_t side) {
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::floor(side * (1.0 - overlap))));
  };
  const auto xs = AxisPositions(width, side_x, stride_for(side_x));
  const auto ys = AxisPositions(height, side_y, stride_for(side_y));

  std::vector<Window> windows;
  windows.reserve(xs.size() * ys.size());
  for (std::uint32_t y : ys) {
    for (std::uint32_t x : xs) windows.push_back({x, y, x + side_x, y + side_y});
  }
  return windows;
}

PixelCoord UpscalePixel(PixelCoord p, Scale scale) {
  return {static_cast<std::uint32_t>(std::llround(p.u * scale.x)),
          static_cast<std::uint32_t>(std::llround(p.v * scale.y))};
}

WindowSelection SelectWindowPairs(const std::vector<Window>& windows1, const std::vector<Window>& windows2,
                                  const CorrespondenceSet& coarse, Scale scale1, Scale scale2, double coverage) {
  WindowSelection selection;
  selection.total = coarse.size();
  if (coarse.empty()) return selection;

  const std::size_t m = coarse.size();
  std::vector<PixelCoord> full1(m);
  std::vector<PixelCoord> full2(m);
  for (std::size_t i = 0; i < m; ++i) {
    full1[i] = UpscalePixel(coarse[i].first, scale1);
    full2[i] = UpscalePixel(coarse[i].second, scale2);
  }

  struct Candidate {
    std::size_t index1;
    std::size_t index2;
    std::vector<std::size_t> members;
    bool taken = false;
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < windows1.size(); ++a) {
    for (std::size_t b = 0; b < windows2.size(); ++b) {
      Candidate c{a, b, {}};
      for (std::size_t i = 0; i < m; ++i) {
        if (windows1[a].contains(full1[i]) && windows2[b].contains(full2[i])) c.members.push_back(i);
      }
      candidates.push_back(std::move(c));
    }
  }

  std::vector<bool> is_covered(m, false);
  while (selection.covered_fraction() < coverage) {
    std::size_t best = candidates.size();
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (candidates[c].taken) continue;
      std::size_t gain = 0;
      for (std::size_t i : candidates[c].members) gain += is_covered[i] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best_gain == 0) break;

    Candidate& pick = candidates[best];
    pick.taken = true;
    for (std::size_t i : pick.members) is_covered[i] = true;
    selection.covered += best_gain;
    selection.pairs.push_back(
        {pick.index1, pick.index2, windows1[pick.index1], windows2[pick.index2], pick.members.size(), best_gain});
  }
  return selection;
}

CorrespondenceSet MapToOriginal(const CorrespondenceSet& matches, const Window& w1, const Window& w2,
                                Resolution crop1, Resolution crop2) {
  if (crop1.width == 0 || crop1.height == 0 || crop2.width == 0 || crop2.height == 0) {
    throw Error(ErrorCode::kEmptyGrid, "crop resolutions must be non-empty");
  }
  const double sx1 = static_cast<double>(w1.width()) / crop1.width;
  const double sy1 = static_cast<double>(w1.height()) / crop1.height;
  const double sx2 = static_cast<double>(w2.width()) / crop2.width;
  const double sy2 = static_cast<double>(w2.height()) / crop2.height;

  BijectiveMerger merger;
  std::vector<Correspondence> mapped;
  mapped.reserve(matches.size());
  for (const auto& c : matches) {
    if (c.first.u >= crop1.width || c.first.v >= crop1.height || c.second.u >= crop2.width ||
        c.second.v >= crop2.height) {
      throw Error(ErrorCode::kOutOfBounds, "match lies outside its crop resolution");
    }
    Correspondence out = c;
    out.first = {w1.x0 + RoundScaled(c.first.u, sx1, w1.width()), w1.y0 + RoundScaled(c.first.v, sy1, w1.height())};
    out.second = {w2.x0 + RoundScaled(c.second.u, sx2, w2.width()),
                  w2.y0 + RoundScaled(c.second.v, sy2, w2.height())};
    mapped.push_back(out);
  }
  merger.Add(mapped);
  return CorrespondenceSet(merger.Take());
}

Resolution CoarseResolution(Resolution full, std::uint32_t target) {
  if (full.width == 0 || full.height == 0) throw Error(ErrorCode::kEmptyGrid, "image size must be non-empty");
  const std::uint32_t largest = std::max(full.width, full.height);
  if (largest <= target) return full;
  const double f = static_cast<double>(target) / largest;
  return {std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround(full.width * f))),
          std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround(full.height * f)))};
}

CoarseToFineResult CoarseToFineMatch(const DescriptorProvider& provider, Resolution size1, Resolution size2,
                                     const CoarseToFineOptions& options) {
  if (size1.width == 0 || size1.height == 0 || size2.width == 0 || size2.height == 0) {
    throw Error(ErrorCode::kEmptyGrid, "image sizes must be non-empty");
  }
  return CoarseToFineMatch(provider, size1, size2,
                           MakeWindowGrid(size1.width, size1.height, options.window_size, options.overlap),
                           MakeWindowGrid(size2.width, size2.height, options.window_size, options.overlap), options);
}

CoarseToFineResult CoarseToFineMatch(const DescriptorProvider& provider, Resolution size1, Resolution size2,
                                     const std::vector<Window>& windows1, const std::vector<Window>& windows2,
                                     const CoarseToFineOptions& options) {
  const Window full1{0, 0, size1.width, size1.height};
  const Window full2{0, 0, size2.width, size2.height};
  CheckWindow(full1, size1, "image-1");
  CheckWindow(full2, size2, "image-2");
  for (const auto& w : windows1) CheckWindow(w, size1, "image-1");
  for (const auto& w : windows2) CheckWindow(w, size2, "image-2");

  CoarseToFineResult result;
  const DescriptorGrid coarse1 = Fetch(provider, 0, full1, CoarseResolution(size1, options.coarse_size));
  const DescriptorGrid coarse2 = Fetch(provider, 1, full2, CoarseResolution(size2, options.coarse_size));
  result.coarse_resolution1 = {coarse1.width(), coarse1.height()};
  result.coarse_resolution2 = {coarse2.width(), coarse2.height()};

  result.coarse =
      FastReciprocalMatches(coarse1, coarse2, std::min(options.k, coarse1.pixel_count()), options.max_iters).matches;
  result.coarse_upscaled =
      MapToOriginal(result.coarse, full1, full2, result.coarse_resolution1, result.coarse_resolution2);

  const Scale scale1{static_cast<double>(size1.width) / coarse1.width(),
                     static_cast<double>(size1.height) / coarse1.height()};
  const Scale scale2{static_cast<double>(size2.width) / coarse2.width(),
                     static_cast<double>(size2.height) / coarse2.height()};
  result.selection = SelectWindowPairs(windows1, windows2, result.coarse, scale1, scale2, options.coverage);

  BijectiveMerger merger;
  for (const WindowPair& pair : result.selection.pairs) {
    const DescriptorGrid crop1 = Fetch(provider, 0, pair.w1, {pair.w1.width(), pair.w1.height()});
    const DescriptorGrid crop2 = Fetch(provider, 1, pair.w2, {pair.w2.width(), pair.w2.height()});
    const auto fine =
        FastReciprocalMatches(crop1, crop2, std::min(options.k, crop1.pixel_count()), options.max_iters).matches;
    merger.Add(MapToOriginal(fine, pair.w1, pair.w2, {crop1.width(), crop1.height()},
                             {crop2.width(), crop2.height()})
                   .pairs());
  }
  std::vector<Correspondence> merged = merger.Take();
  std::sort(merged.begin(), merged.end(), PairLess);
  result.matches = CorrespondenceSet(std::move(merged));
  return result;
}

}  // namespace recimatch
