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
#include <cstdint>
#include <utility>
#include <vector>

#include "recimatch/coarse2fine.h"
#include "recimatch/grids.h"

namespace recimatch {

// Projective map from view-2 pixel coordinates to canvas coordinates,
// [x', y', w'] = H [x, y, 1], row-major.
struct Warp {
  std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Warp Identity() { return {}; }
  static Warp Similarity(double scale, double tx, double ty) { return {{scale, 0, tx, 0, scale, ty, 0, 0, 1}}; }
  static Warp Translation(double tx, double ty) { return Similarity(1.0, tx, ty); }

  std::array<double, 2> Apply(double x, double y) const;
  double Determinant() const;
  Warp Inverse() const;
};

// Synthetic two-view scene. View 1 samples the canvas at identity
// coordinates, view 2 through `warp`. Descriptors come from a random field:
// unit vectors on a square lattice with spacing `length_scale`, bilinearly
// interpolated, plus an optional finer lattice ("detail") whose amplitude can
// fall off linearly from the left to the right canvas edge. Noise of expected
// norm `sigma` is added to each unit descriptor before renormalization.
//
// Randomness is stateless: lattice vectors and noise are Box-Muller normals
// fed by SplitMix64 hashes of (seed, octave or view, position, channel), so a
// pixel renders identically in any crop and on any platform.
struct SceneSpec {
  std::uint32_t canvas_width = 256;
  std::uint32_t canvas_height = 256;
  std::uint32_t width1 = 256;
  std::uint32_t height1 = 256;
  std::uint32_t width2 = 256;
  std::uint32_t height2 = 256;
  Warp warp;
  std::uint32_t dim = 24;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double length_scale = 8.0;
  double detail_scale = 0.0;  // 0 disables the detail octave
  double detail_amplitude = 0.0;
  double detail_falloff = 0.0;  // in [0, 1]; 1 fades the detail out completely at the right edge
  double pixel_size = 0.01;     // metric size of one canvas pixel
  double depth = 2.0;           // metric depth of the canvas plane

  void Validate() const;
};

class SceneRenderer {
 public:
  explicit SceneRenderer(SceneSpec spec);

  const SceneSpec& spec() const { return spec_; }
  Resolution view_size(int view) const;

  std::array<double, 2> ToCanvas(int view, double x, double y) const;
  // Continuous view-2 position showing the same canvas point as view-1 pixel (x, y).
  std::array<double, 2> View1ToView2(double x, double y) const;

  // Descriptors of a crop of `view` (0 or 1) resampled to `working`, point
  // sampled at pixel centers.
  DescriptorGrid Render(int view, const Window& window, Resolution working) const;
  DescriptorGrid RenderView(int view) const;
  // Canvas plane in metric units; pixels falling off the canvas are invalid.
  PointMap RenderPoints(int view) const;
  // Pixel pairs whose canvas positions coincide within 0.5 px.
  CorrespondenceSet GroundTruth() const;

 private:
  struct Octave {
    std::uint64_t id = 0;
    double spacing = 1.0;
    std::int64_t ix0 = 0;
    std::int64_t iy0 = 0;
    std::int64_t nx = 0;
    std::int64_t ny = 0;
    std::vector<float> vectors;  // cached lattice vectors, row-major over (iy, ix)
  };

  void BuildOctave(Octave& octave, double min_x, double min_y, double max_x, double max_y) const;
  void LatticeVector(const Octave& octave, std::int64_t ix, std::int64_t iy, float* out) const;
  void SampleField(double cx, double cy, float* out) const;

  SceneSpec spec_;
  Warp inverse_;
  std::vector<Octave> octaves_;
};

class SyntheticProvider : public DescriptorProvider {
 public:
  explicit SyntheticProvider(const SceneRenderer& renderer) : renderer_(renderer) {}
  DescriptorGrid Descriptors(int image, const Window& window, Resolution working) const override {
    return renderer_.Render(image, window, working);
  }

 private:
  const SceneRenderer& renderer_;
};

struct Scene {
  DescriptorGrid d1;
  DescriptorGrid d2;
  CorrespondenceSet gt;
  PointMap x1;
  PointMap x2;
};

Scene GenerateScene(const SceneSpec& spec);

// I.i.d. Gaussian descriptors, normalized; std::mt19937_64 seeded with `seed`,
// grid 1 drawn before grid 2.
std::pair<DescriptorGrid, DescriptorGrid> GenerateRandomGrids(std::uint32_t height, std::uint32_t width,
                                                              std::uint32_t dim, std::uint64_t seed);

}  // namespace recimatch
