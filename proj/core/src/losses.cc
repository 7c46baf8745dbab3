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

#include "recimatch/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "recimatch/error.h"
#include "recimatch/nn_index.h"
#include "recimatch/rng.h"

namespace recimatch {
namespace {

double Norm3(const std::array<float, 3>& p) {
  return std::sqrt(static_cast<double>(p[0]) * p[0] + static_cast<double>(p[1]) * p[1] +
                   static_cast<double>(p[2]) * p[2]);
}

double Dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) acc += static_cast<double>(a[c]) * b[c];
  return acc;
}

// log(sum(exp(x))) without overflow.
double LogSumExp(const std::vector<double>& x) {
  const double peak = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

}  // namespace

void LossConfig::Validate() const {
  if (!(alpha >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  if (!(beta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 0");
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
}

RegressionLoss ComputeRegressionLoss(const PointMap& pred, const PointMap& gt, bool metric_mode) {
  if (pred.shape() != gt.shape()) throw Error(ErrorCode::kShapeMismatch, "prediction and ground truth shapes differ");
  RegressionLoss out;
  out.shape = gt.shape();
  const std::size_t n = gt.pixel_count();
  out.valid.assign(n, 0);
  out.per_pixel.assign(n, 0.0);

  double sum_pred = 0.0;
  double sum_gt = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pred.valid(i) || !gt.valid(i)) continue;
    out.valid[i] = 1;
    sum_pred += Norm3(pred.point(i));
    sum_gt += Norm3(gt.point(i));
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::kNoValidPixels, "no pixel is valid in both pointmaps");

  out.normalization.z_gt = sum_gt / count;
  out.normalization.z = metric_mode ? out.normalization.z_gt : sum_pred / count;
  const double z = out.normalization.z;
  const double z_gt = out.normalization.z_gt;
  if (!(z > 0.0) || !(z_gt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pointmap normalizer is zero (all valid points at the origin)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.valid[i]) continue;
    const auto p = pred.point(i);
    const auto g = gt.point(i);
    double sq = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double diff = p[c] / z - g[c] / z_gt;
      sq += diff * diff;
    }
    out.per_pixel[i] = std::sqrt(sq);
  }
  return out;
}

double ConfidenceLoss(const RegressionLoss& regression, const ConfidenceMap& confidence, double alpha) {
  if (confidence.shape() != regression.shape) {
    throw Error(ErrorCode::kShapeMismatch, "confidence map shape differs from the regression loss");
  }
  if (!(alpha >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  const auto values = confidence.values();
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!regression.valid[i]) continue;
    const double c = values[i];
    total += c * regression.per_pixel[i] - alpha * std::log(c);
  }
  return total;
}

CorrespondenceSet GroundTruthCorrespondences(const PointMap& gt1, const PointMap& gt2, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  if (gt1.valid_count() == 0 || gt2.valid_count() == 0) return {};

  double sum = 0.0;
  std::size_t count = 0;
  for (const PointMap* map : {&gt1, &gt2}) {
    for (std::size_t i = 0; i < map->pixel_count(); ++i) {
      if (!map->valid(i)) continue;
      sum += Norm3(map->point(i));
      ++count;
    }
  }
  const double radius = epsilon * (sum / count);
  const double radius_sq = radius * radius;

  const NNIndex index1 = NNIndex::Build(gt1, NNBackend::kKdTree);
  const NNIndex index2 = NNIndex::Build(gt2, NNBackend::kKdTree);

  auto valid_points = [](const PointMap& map, std::vector<std::uint32_t>& ids) {
    std::vector<float> xs;
    for (std::size_t i = 0; i < map.pixel_count(); ++i) {
      if (!map.valid(i)) continue;
      ids.push_back(static_cast<std::uint32_t>(i));
      const auto p = map.point(i);
      xs.insert(xs.end(), p.begin(), p.end());
    }
    return xs;
  };
  std::vector<std::uint32_t> ids1;
  std::vector<std::uint32_t> ids2;
  const auto xs1 = valid_points(gt1, ids1);
  const auto xs2 = valid_points(gt2, ids2);
  const auto forward = index2.BatchQueryLinear(xs1);
  const auto backward_list = index1.BatchQueryLinear(xs2);
  std::unordered_map<std::uint32_t, std::uint32_t> backward;
  for (std::size_t j = 0; j < ids2.size(); ++j) backward.emplace(ids2[j], backward_list[j]);

  std::vector<Correspondence> pairs;
  for (std::size_t a = 0; a < ids1.size(); ++a) {
    const std::uint32_t i = ids1[a];
    const std::uint32_t j = forward[a];
    if (backward.at(j) != i) continue;
    const auto p = gt1.point(i);
    const auto q = gt2.point(j);
    if (SquaredDistance(p, q) > radius_sq) continue;
    pairs.push_back({gt1.shape().pixel(i), gt2.shape().pixel(j)});
  }
  return CorrespondenceSet(std::move(pairs));
}

CorrespondenceSet SampleTrainingCorrespondences(const CorrespondenceSet& gt, std::size_t n, std::uint64_t seed,
                                                GridShape shape1, GridShape shape2) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size n must be >= 1");
  if (shape1.pixel_count() == 0 || shape2.pixel_count() == 0) {
    throw Error(ErrorCode::kEmptyGrid, "grid shapes must be non-empty");
  }
  gt.CheckBounds(shape1, shape2);

  Rng rng(seed);
  const std::size_t true_count = std::min(n, gt.size());
  std::vector<std::size_t> order(gt.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < true_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.UniformInt(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(true_count);
  std::sort(order.begin(), order.end());

  std::vector<Correspondence> out;
  out.reserve(n);
  auto pair_key = [&](PixelCoord a, PixelCoord b) {
    return (static_cast<std::uint64_t>(shape1.linear_index(a)) << 32) | shape2.linear_index(b);
  };
  std::unordered_set<std::uint64_t> taken;
  for (const auto& c : gt) taken.insert(pair_key(c.first, c.second));
  for (std::size_t i : order) out.push_back({gt[i].first, gt[i].second, false});

  const std::size_t padding = n - true_count;
  const long double all_pairs = static_cast<long double>(shape1.pixel_count()) * shape2.pixel_count();
  if (static_cast<long double>(padding) > all_pairs - static_cast<long double>(taken.size())) {
    throw Error(ErrorCode::kInvalidArgument, "grids too small to pad to " + std::to_string(n) + " pairs");
  }
  while (out.size() < n) {
    const PixelCoord a = shape1.pixel(static_cast<std::size_t>(rng.UniformInt(shape1.pixel_count())));
    const PixelCoord b = shape2.pixel(static_cast<std::size_t>(rng.UniformInt(shape2.pixel_count())));
    if (!taken.insert(pair_key(a, b)).second) continue;
    out.push_back({a, b, true});
  }
  return CorrespondenceSet(std::move(out));
}

double MatchingLoss(const DescriptorGrid& d1, const DescriptorGrid& d2, const CorrespondenceSet& pairs, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
  if (d1.dim() != d2.dim()) throw Error(ErrorCode::kDimensionMismatch, "descriptor dimensions differ");
  if (!d1.normalized() || !d2.normalized()) {
    throw Error(ErrorCode::kNotNormalized, "matching loss requires normalized descriptor grids");
  }
  if (pairs.true_count() == 0) throw Error(ErrorCode::kInvalidArgument, "matching loss needs at least one true pair");
  pairs.CheckBounds(d1.shape(), d2.shape());

  // Candidate pools, deduplicated, in first-seen order.
  std::vector<std::size_t> pool1;
  std::vector<std::size_t> pool2;
  {
    std::unordered_set<std::size_t> seen1;
    std::unordered_set<std::size_t> seen2;
    for (const auto& c : pairs) {
      const std::size_t i = d1.shape().linear_index(c.first);
      const std::size_t j = d2.shape().linear_index(c.second);
      if (seen1.insert(i).second) pool1.push_back(i);
      if (seen2.insert(j).second) pool2.push_back(j);
    }
  }

  double loss = 0.0;
  std::vector<double> logits;
  for (const auto& c : pairs) {
    if (c.false_padding) continue;
    const std::size_t i = d1.shape().linear_index(c.first);
    const std::size_t j = d2.shape().linear_index(c.second);
    const double positive = Dot(d1.descriptor(i), d2.descriptor(j)) / tau;

    logits.clear();
    for (std::size_t k : pool1) logits.push_back(Dot(d1.descriptor(k), d2.descriptor(j)) / tau);
    loss += LogSumExp(logits) - positive;

    logits.clear();
    for (std::size_t k : pool2) logits.push_back(Dot(d1.descriptor(i), d2.descriptor(k)) / tau);
    loss += LogSumExp(logits) - positive;
  }
  return loss;
}

}  // namespace recimatch
