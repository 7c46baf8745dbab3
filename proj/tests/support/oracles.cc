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


#include "support/oracles.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace recimatch::testing {

std::size_t OracleNearest(const DescriptorGrid& grid, std::span<const float> query) {
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.pixel_count(); ++i) {
    const auto x = grid.descriptor(i);
    double distance = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double t = static_cast<double>(query[c]) - static_cast<double>(x[c]);
      distance += t * t;
    }
    if (distance < best_distance) {
      best_distance = distance;
      best = i;
    }
  }
  return best;
}

std::size_t OracleMaxDot(const DescriptorGrid& grid, std::span<const float> query) {
  std::size_t best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.pixel_count(); ++i) {
    const auto x = grid.descriptor(i);
    double dot = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) dot += static_cast<double>(query[c]) * x[c];
    if (dot > best_dot) {
      best_dot = dot;
      best = i;
    }
  }
  return best;
}

OracleTables OracleNeighborTables(const DescriptorGrid& d1, const DescriptorGrid& d2) {
  OracleTables tables;
  for (std::size_t i = 0; i < d1.pixel_count(); ++i) tables.forward.push_back(OracleNearest(d2, d1.descriptor(i)));
  for (std::size_t j = 0; j < d2.pixel_count(); ++j) tables.backward.push_back(OracleNearest(d1, d2.descriptor(j)));
  return tables;
}

CorrespondenceSet OracleReciprocal(const OracleTables& tables, GridShape shape1, GridShape shape2) {
  std::vector<Correspondence> pairs;
  for (std::size_t i = 0; i < tables.forward.size(); ++i) {
    const std::size_t j = tables.forward[i];
    if (tables.backward[j] == i) pairs.push_back({shape1.pixel(i), shape2.pixel(j)});
  }
  return CorrespondenceSet(std::move(pairs)).Sorted();
}

CorrespondenceSet OracleReciprocal(const DescriptorGrid& d1, const DescriptorGrid& d2) {
  return OracleReciprocal(OracleNeighborTables(d1, d2), d1.shape(), d2.shape());
}

WalkEnd OracleWalk(const OracleTables& tables, std::size_t start) {
  std::vector<std::size_t> path;
  std::set<std::size_t> seen;
  std::size_t i = start;
  while (seen.insert(i).second) {
    path.push_back(i);
    i = tables.backward[tables.forward[i]];
  }
  const auto entry = std::find(path.begin(), path.end(), i);
  WalkEnd end;
  end.cycle_length = 2 * static_cast<std::size_t>(path.end() - entry);
  end.first = *std::min_element(entry, path.end());
  end.second = tables.forward[end.first];
  return end;
}

double OracleInfoNce(const DescriptorGrid& d1, const DescriptorGrid& d2, const CorrespondenceSet& pairs, double tau) {
  std::set<std::size_t> pool1;
  std::set<std::size_t> pool2;
  for (const auto& c : pairs) {
    pool1.insert(d1.shape().linear_index(c.first));
    pool2.insert(d2.shape().linear_index(c.second));
  }
  auto similarity = [&](std::size_t i, std::size_t j) {
    const auto a = d1.descriptor(i);
    const auto b = d2.descriptor(j);
    double dot = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) dot += static_cast<double>(a[c]) * b[c];
    return std::exp(dot / tau);
  };
  double loss = 0.0;
  for (const auto& c : pairs) {
    if (c.false_padding) continue;
    const std::size_t i = d1.shape().linear_index(c.first);
    const std::size_t j = d2.shape().linear_index(c.second);
    double column = 0.0;
    for (std::size_t k : pool1) column += similarity(k, j);
    double row = 0.0;
    for (std::size_t k : pool2) row += similarity(i, k);
    loss -= std::log(similarity(i, j) / column) + std::log(similarity(i, j) / row);
  }
  return loss;
}

DescriptorGrid MakeGrid(std::uint32_t height, std::uint32_t width, std::uint32_t dim, std::vector<float> data) {
  return NormalizeDescriptors(DescriptorGrid(height, width, dim, std::move(data), false));
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device device;
  path_ = std::filesystem::temp_directory_path() /
          ("recimatch_test_" + std::to_string(device()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ignored;
  std::filesystem::remove_all(path_, ignored);
}

}  // namespace recimatch::testing
