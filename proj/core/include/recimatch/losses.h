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
#include <vector>

#include "recimatch/grids.h"

namespace recimatch {

// Loss weights.
struct LossConfig {
  double alpha = 0.2;  // confidence regularizer weight
  double beta = 1.0;   // matching loss weight
  double tau = 0.07;   // InfoNCE temperature
  bool metric_mode = false;

  void Validate() const;
};

// Mean distance to the origin of the valid points, per cloud.
struct NormalizationReport {
  double z = 0.0;     // prediction
  double z_gt = 0.0;  // ground truth
};

struct RegressionLoss {
  GridShape shape;
  // Per-pixel ||X/z - X_gt/z_gt||; 0 where `valid` is 0.
  std::vector<double> per_pixel;
  std::vector<std::uint8_t> valid;
  NormalizationReport normalization;
};

// Pixels contribute when valid in both maps; normalizers are computed over
// those pixels. In metric mode the prediction shares the ground-truth
// normalizer, so absolute scale is penalized.
RegressionLoss ComputeRegressionLoss(const PointMap& pred, const PointMap& gt, bool metric_mode);

// sum over valid pixels of C_i * l_i - alpha * log C_i.
double ConfidenceLoss(const RegressionLoss& regression, const ConfidenceMap& confidence, double alpha);

// Mutual nearest neighbors between two 3D pointmaps (kd-tree search over the
// valid pixels) that lie within epsilon * z_gt of each other, where z_gt is
// the mean origin distance of the valid points of both maps.
inline constexpr double kDefaultGtEpsilon = 1e-3;
CorrespondenceSet GroundTruthCorrespondences(const PointMap& gt1, const PointMap& gt2,
                                             double epsilon = kDefaultGtEpsilon);

// Exactly n pairs: min(n, |gt|) true pairs drawn uniformly without
// replacement, the rest random pixel pairs flagged as false padding. Padding
// never repeats a pair of gt or another padding pair.
inline constexpr std::size_t kTrainingCorrespondences = 4096;
CorrespondenceSet SampleTrainingCorrespondences(const CorrespondenceSet& gt, std::size_t n, std::uint64_t seed,
                                                GridShape shape1, GridShape shape2);

// Bidirectional InfoNCE over the candidate pools P1 (grid-1 pixels of all
// pairs) and P2 (grid-2 pixels of all pairs), with logits D1_i . D2_j / tau.
// Only true pairs contribute positive terms; padding enlarges the pools.
double MatchingLoss(const DescriptorGrid& d1, const DescriptorGrid& d2, const CorrespondenceSet& pairs, double tau);

inline double TotalLoss(double confidence_loss, double matching_loss, double beta) {
  return confidence_loss + beta * matching_loss;
}

}  // namespace recimatch
