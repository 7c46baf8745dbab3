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

#include "recimatch/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "recimatch/error.h"
#include "recimatch/rng.h"

namespace recimatch {
namespace {

constexpr std::uint64_t kLatticeTag = 0x6C61747469636521ULL;
constexpr std::uint64_t kNoiseTag = 0x6E6F697365212121ULL;
// Noise is keyed on view coordinates quantized to 1/16 px.
constexpr double kNoiseQuantum = 16.0;

std::uint64_t HashKey(std::uint64_t seed, std::uint64_t tag, std::int64_t a, std::int64_t b) {
  return Mix64(Mix64(Mix64(seed ^ tag) + static_cast<std::uint64_t>(a)) + static_cast<std::uint64_t>(b));
}

double HashUniform(std::uint64_t key) { return (static_cast<double>(Mix64(key) >> 11) + 0.5) * 0x1.0p-53; }

double HashGaussian(std::uint64_t key, std::uint32_t channel) {
  const double u1 = HashUniform(key + 2 * static_cast<std::uint64_t>(channel));
  const double u2 = HashUniform(key + 2 * static_cast<std::uint64_t>(channel) + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void NormalizeInPlace(std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
    return;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

}  // namespace

std::array<double, 2> Warp::Apply(double x, double y) const {
  const double xp = h[0] * x + h[1] * y + h[2];
  const double yp = h[3] * x + h[4] * y + h[5];
  const double wp = h[6] * x + h[7] * y + h[8];
  return {xp / wp, yp / wp};
}

double Warp::Determinant() const {
  return h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6]) + h[2] * (h[3] * h[7] - h[4] * h[6]);
}

Warp Warp::Inverse() const {
  const double det = Determinant();
  if (std::abs(det) < 1e-12) throw Error(ErrorCode::kInvalidArgument, "warp is not invertible");
  const double inv = 1.0 / det;
  Warp out;
  out.h = {(h[4] * h[8] - h[5] * h[7]) * inv, (h[2] * h[7] - h[1] * h[8]) * inv, (h[1] * h[5] - h[2] * h[4]) * inv,
           (h[5] * h[6] - h[3] * h[8]) * inv, (h[0] * h[8] - h[2] * h[6]) * inv, (h[2] * h[3] - h[0] * h[5]) * inv,
           (h[3] * h[7] - h[4] * h[6]) * inv, (h[1] * h[6] - h[0] * h[7]) * inv, (h[0] * h[4] - h[1] * h[3]) * inv};
  return out;
}

void SceneSpec::Validate() const {
  if (canvas_width == 0 || canvas_height == 0 || width1 == 0 || height1 == 0 || width2 == 0 || height2 == 0) {
    throw Error(ErrorCode::kEmptyGrid, "scene canvas and views must be non-empty");
  }
  if (width1 > canvas_width || height1 > canvas_height) {
    throw Error(ErrorCode::kInvalidArgument, "view 1 must fit inside the canvas");
  }
  if (dim < 2) throw Error(ErrorCode::kInvalidArgument, "scene descriptor dimension must be >= 2");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
  if (!(length_scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "length_scale must be > 0");
  if (!(detail_scale >= 0.0) || !(detail_amplitude >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "detail scale and amplitude must be >= 0");
  }
  if (!(detail_falloff >= 0.0 && detail_falloff <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "detail_falloff must lie in [0, 1]");
  }
  if (!(pixel_size > 0.0) || !std::isfinite(depth)) throw Error(ErrorCode::kInvalidArgument, "bad metric embedding");
  if (!(std::abs(warp.Determinant()) >= 1e-12)) throw Error(ErrorCode::kInvalidArgument, "warp is not invertible");

  for (std::uint32_t y = 0; y < height2; ++y) {
    for (std::uint32_t x = 0; x < width2; ++x) {
      const auto c = warp.Apply(x, y);
      if (c[0] >= 0.0 && c[1] >= 0.0 && c[0] <= canvas_width - 1.0 && c[1] <= canvas_height - 1.0) return;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "warp maps view 2 fully outside the canvas");
}

SceneRenderer::SceneRenderer(SceneSpec spec) : spec_(spec) {
  spec_.Validate();
  inverse_ = spec_.warp.Inverse();

  // Cache lattice vectors over the canvas and the view-2 footprint; anything
  // outside is hashed on demand.
  const double cw = spec_.canvas_width;
  const double ch = spec_.canvas_height;
  double min_x = 0.0, min_y = 0.0, max_x = cw, max_y = ch;
  for (double x : {0.0, static_cast<double>(spec_.width2)}) {
    for (double y : {0.0, static_cast<double>(spec_.height2)}) {
      const auto c = spec_.warp.Apply(x, y);
      if (!std::isfinite(c[0]) || !std::isfinite(c[1])) continue;
      min_x = std::min(min_x, std::max(c[0], -4.0 * cw));
      max_x = std::max(max_x, std::min(c[0], 5.0 * cw));
      min_y = std::min(min_y, std::max(c[1], -4.0 * ch));
      max_y = std::max(max_y, std::min(c[1], 5.0 * ch));
    }
  }

  Octave base;
  base.id = 0;
  base.spacing = spec_.length_scale;
  BuildOctave(base, min_x, min_y, max_x, max_y);
  octaves_.push_back(std::move(base));
  if (spec_.detail_scale > 0.0 && spec_.detail_amplitude > 0.0) {
    Octave detail;
    detail.id = 1;
    detail.spacing = spec_.detail_scale;
    BuildOctave(detail, min_x, min_y, max_x, max_y);
    octaves_.push_back(std::move(detail));
  }
}

void SceneRenderer::BuildOctave(Octave& octave, double min_x, double min_y, double max_x, double max_y) const {
  octave.ix0 = static_cast<std::int64_t>(std::floor(min_x / octave.spacing)) - 1;
  octave.iy0 = static_cast<std::int64_t>(std::floor(min_y / octave.spacing)) - 1;
  octave.nx = static_cast<std::int64_t>(std::floor(max_x / octave.spacing)) + 3 - octave.ix0;
  octave.ny = static_cast<std::int64_t>(std::floor(max_y / octave.spacing)) + 3 - octave.iy0;
  const std::size_t d = spec_.dim;
  std::vector<float> vectors(static_cast<std::size_t>(octave.nx * octave.ny) * d);
  for (std::int64_t iy = 0; iy < octave.ny; ++iy) {
    for (std::int64_t ix = 0; ix < octave.nx; ++ix) {
      LatticeVector(octave, octave.ix0 + ix, octave.iy0 + iy,
                    vectors.data() + static_cast<std::size_t>(iy * octave.nx + ix) * d);
    }
  }
  octave.vectors = std::move(vectors);
}

void SceneRenderer::LatticeVector(const Octave& octave, std::int64_t ix, std::int64_t iy, float* out) const {
  const std::int64_t cx = ix - octave.ix0;
  const std::int64_t cy = iy - octave.iy0;
  if (!octave.vectors.empty() && cx >= 0 && cy >= 0 && cx < octave.nx && cy < octave.ny) {
    const float* cached = octave.vectors.data() + static_cast<std::size_t>(cy * octave.nx + cx) * spec_.dim;
    std::copy(cached, cached + spec_.dim, out);
    return;
  }
  const std::uint64_t key = HashKey(spec_.seed, kLatticeTag + octave.id, ix, iy);
  std::vector<double> v(spec_.dim);
  for (std::uint32_t c = 0; c < spec_.dim; ++c) v[c] = HashGaussian(key, c);
  NormalizeInPlace(v);
  for (std::uint32_t c = 0; c < spec_.dim; ++c) out[c] = static_cast<float>(v[c]);
}

void SceneRenderer::SampleField(double cx, double cy, float* out) const {
  const std::size_t d = spec_.dim;
  std::fill(out, out + d, 0.0f);
  std::vector<float> corner(d);
  for (const Octave& octave : octaves_) {
    double amplitude = 1.0;
    if (octave.id == 1) {
      const double t = std::clamp(cx / spec_.canvas_width, 0.0, 1.0);
      amplitude = spec_.detail_amplitude * (1.0 - spec_.detail_falloff * t);
      if (amplitude <= 0.0) continue;
    }
    const double gx = cx / octave.spacing;
    const double gy = cy / octave.spacing;
    const auto ix = static_cast<std::int64_t>(std::floor(gx));
    const auto iy = static_cast<std::int64_t>(std::floor(gy));
    const double fx = gx - static_cast<double>(ix);
    const double fy = gy - static_cast<double>(iy);
    const double weights[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    const std::int64_t offsets[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int k = 0; k < 4; ++k) {
      LatticeVector(octave, ix + offsets[k][0], iy + offsets[k][1], corner.data());
      const auto w = static_cast<float>(amplitude * weights[k]);
      for (std::size_t c = 0; c < d; ++c) out[c] += w * corner[c];
    }
  }
}

Resolution SceneRenderer::view_size(int view) const {
  return view == 0 ? Resolution{spec_.width1, spec_.height1} : Resolution{spec_.width2, spec_.height2};
}

std::array<double, 2> SceneRenderer::ToCanvas(int view, double x, double y) const {
  if (view == 0) return {x, y};
  return spec_.warp.Apply(x, y);
}

std::array<double, 2> SceneRenderer::View1ToView2(double x, double y) const { return inverse_.Apply(x, y); }

DescriptorGrid SceneRenderer::Render(int view, const Window& window, Resolution working) const {
  if (view != 0 && view != 1) throw Error(ErrorCode::kInvalidArgument, "view must be 0 or 1");
  const Resolution size = view_size(view);
  if (window.x0 >= window.x1 || window.y0 >= window.y1 || window.x1 > size.width || window.y1 > size.height) {
    throw Error(ErrorCode::kOutOfBounds, "window " + window.ToString() + " outside view");
  }
  if (working.width == 0 || working.height == 0) throw Error(ErrorCode::kEmptyGrid, "working resolution is empty");

  const std::size_t d = spec_.dim;
  const double sx = static_cast<double>(window.width()) / working.width;
  const double sy = static_cast<double>(window.height()) / working.height;
  const double noise_scale = spec_.sigma / std::sqrt(static_cast<double>(d));
  std::vector<float> data(static_cast<std::size_t>(working.width) * working.height * d);
  std::vector<float> field(d);
  std::vector<double> value(d);
  for (std::uint32_t b = 0; b < working.height; ++b) {
    for (std::uint32_t a = 0; a < working.width; ++a) {
      const double x = window.x0 + (a + 0.5) * sx - 0.5;
      const double y = window.y0 + (b + 0.5) * sy - 0.5;
      const auto canvas = ToCanvas(view, x, y);
      SampleField(canvas[0], canvas[1], field.data());
      for (std::size_t c = 0; c < d; ++c) value[c] = field[c];
      NormalizeInPlace(value);
      if (spec_.sigma > 0.0) {
        const std::uint64_t key = HashKey(spec_.seed, kNoiseTag + static_cast<std::uint64_t>(view),
                                          std::llround(x * kNoiseQuantum), std::llround(y * kNoiseQuantum));
        for (std::size_t c = 0; c < d; ++c) value[c] += noise_scale * HashGaussian(key, static_cast<std::uint32_t>(c));
        NormalizeInPlace(value);
      }
      float* out = data.data() + (static_cast<std::size_t>(b) * working.width + a) * d;
      for (std::size_t c = 0; c < d; ++c) out[c] = static_cast<float>(value[c]);
    }
  }
  return NormalizeDescriptors(DescriptorGrid(working.height, working.width, spec_.dim, std::move(data), false));
}

DescriptorGrid SceneRenderer::RenderView(int view) const {
  const Resolution size = view_size(view);
  return Render(view, Window{0, 0, size.width, size.height}, size);
}

PointMap SceneRenderer::RenderPoints(int view) const {
  const Resolution size = view_size(view);
  const std::size_t n = static_cast<std::size_t>(size.width) * size.height;
  std::vector<float> points(3 * n, 0.0f);
  std::vector<std::uint8_t> valid(n, 0);
  for (std::uint32_t y = 0; y < size.height; ++y) {
    for (std::uint32_t x = 0; x < size.width; ++x) {
      const auto c = ToCanvas(view, x, y);
      const std::size_t i = static_cast<std::size_t>(y) * size.width + x;
      if (!(c[0] >= 0.0 && c[1] >= 0.0 && c[0] <= spec_.canvas_width - 1.0 && c[1] <= spec_.canvas_height - 1.0)) {
        continue;
      }
      valid[i] = 1;
      points[3 * i] = static_cast<float>(c[0] * spec_.pixel_size);
      points[3 * i + 1] = static_cast<float>(c[1] * spec_.pixel_size);
      points[3 * i + 2] = static_cast<float>(spec_.depth);
    }
  }
  return PointMap(size.height, size.width, std::move(points), std::move(valid));
}

CorrespondenceSet SceneRenderer::GroundTruth() const {
  const Resolution size1 = view_size(0);
  const Resolution size2 = view_size(1);
  const std::size_t n1 = static_cast<std::size_t>(size1.width) * size1.height;
  std::vector<double> best_distance(n1, 1.0);
  std::vector<std::int64_t> best_match(n1, -1);
  for (std::uint32_t y = 0; y < size2.height; ++y) {
    for (std::uint32_t x = 0; x < size2.width; ++x) {
      const auto c = ToCanvas(1, x, y);
      const double u = std::round(c[0]);
      const double v = std::round(c[1]);
      if (!(u >= 0.0 && v >= 0.0 && u < size1.width && v < size1.height)) continue;
      const double dist = std::hypot(c[0] - u, c[1] - v);
      if (dist > 0.5) continue;
      const std::size_t i = static_cast<std::size_t>(v) * size1.width + static_cast<std::size_t>(u);
      if (dist < best_distance[i]) {
        best_distance[i] = dist;
        best_match[i] = static_cast<std::int64_t>(y) * size2.width + x;
      }
    }
  }
  std::vector<Correspondence> pairs;
  const GridShape shape1{size1.height, size1.width};
  const GridShape shape2{size2.height, size2.width};
  for (std::size_t i = 0; i < n1; ++i) {
    if (best_match[i] < 0) continue;
    pairs.push_back({shape1.pixel(i), shape2.pixel(static_cast<std::size_t>(best_match[i]))});
  }
  return CorrespondenceSet(std::move(pairs));
}

Scene GenerateScene(const SceneSpec& spec) {
  const SceneRenderer renderer(spec);
  return Scene{renderer.RenderView(0), renderer.RenderView(1), renderer.GroundTruth(), renderer.RenderPoints(0),
               renderer.RenderPoints(1)};
}

std::pair<DescriptorGrid, DescriptorGrid> GenerateRandomGrids(std::uint32_t height, std::uint32_t width,
                                                              std::uint32_t dim, std::uint64_t seed) {
  Rng rng(seed);
  auto draw = [&] {
    std::vector<float> data(static_cast<std::size_t>(height) * width * dim);
    for (float& x : data) x = static_cast<float>(rng.Gaussian());
    return NormalizeDescriptors(DescriptorGrid(height, width, dim, std::move(data), false));
  };
  DescriptorGrid d1 = draw();
  DescriptorGrid d2 = draw();
  return {std::move(d1), std::move(d2)};
}

}  // namespace recimatch
