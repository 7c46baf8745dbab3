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

#include "recimatch/nn_index.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include "recimatch/error.h"
#include "recimatch/parallel.h"

namespace recimatch {
namespace {

constexpr std::size_t kBlockSize = 512;
constexpr std::size_t kQueryTile = 16;
constexpr std::size_t kLeafSize = 16;

struct Best {
  double distance = std::numeric_limits<double>::infinity();
  std::uint32_t id = std::numeric_limits<std::uint32_t>::max();

  void Offer(double d, std::uint32_t candidate) {
    if (d < distance || (d == distance && candidate < id)) {
      distance = d;
      id = candidate;
    }
  }
};

struct KdNode {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t split_dim = 0;
  float split_value = 0.0f;

  bool leaf() const { return left < 0; }
};

}  // namespace

std::string_view BackendName(NNBackend backend) {
  return backend == NNBackend::kKdTree ? "kd-tree" : "brute-force";
}

double SquaredDistance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const float t = a[c] - b[c];
    acc += static_cast<double>(t) * static_cast<double>(t);
  }
  return acc;
}

struct NNIndex::Impl {
  NNBackend backend;
  std::uint32_t dim;
  GridShape shape;
  std::vector<std::uint32_t> linear_ids;  // internal id -> source linear index, ascending
  std::vector<float> points;              // id-major copy, n x dim
  std::vector<float> columns;             // channel-major copy for the scan, dim x n
  float approx_tolerance = 0.0f;          // relative error bound of the binary32 screening pass
  std::vector<std::uint32_t> order;       // kd-tree permutation of ids
  std::vector<KdNode> nodes;

  std::size_t size() const { return linear_ids.size(); }
  std::span<const float> point(std::uint32_t id) const {
    return std::span<const float>(points).subspan(static_cast<std::size_t>(id) * dim, dim);
  }

  void BuildColumns() {
    const std::size_t n = size();
    columns.resize(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < dim; ++c) columns[c * n + i] = points[i * dim + c];
    }
    // Screening sums d binary32 squares: relative error below (d+1)*2^-24.
    approx_tolerance = 8.0f * static_cast<float>(dim + 2) * std::numeric_limits<float>::epsilon() * 0.5f;
  }

  std::int32_t BuildKd(std::uint32_t begin, std::uint32_t end) {
    const auto node_index = static_cast<std::int32_t>(nodes.size());
    nodes.push_back(KdNode{begin, end});
    if (end - begin <= kLeafSize) return node_index;

    std::uint32_t split_dim = 0;
    float widest = -1.0f;
    for (std::uint32_t c = 0; c < dim; ++c) {
      float lo = std::numeric_limits<float>::infinity();
      float hi = -std::numeric_limits<float>::infinity();
      for (std::uint32_t i = begin; i < end; ++i) {
        const float x = points[static_cast<std::size_t>(order[i]) * dim + c];
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        split_dim = c;
      }
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    auto key = [&](std::uint32_t id) { return points[static_cast<std::size_t>(id) * dim + split_dim]; };
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const float ka = key(a);
                       const float kb = key(b);
                       return ka < kb || (ka == kb && a < b);
                     });
    const float split_value = key(order[mid]);
    const std::int32_t left = BuildKd(begin, mid);
    const std::int32_t right = BuildKd(mid, end);
    KdNode& node = nodes[static_cast<std::size_t>(node_index)];
    node.left = left;
    node.right = right;
    node.split_dim = split_dim;
    node.split_value = split_value;
    return node_index;
  }

  void SearchKd(std::int32_t node_index, std::span<const float> q, Best& best) const {
    const KdNode& node = nodes[static_cast<std::size_t>(node_index)];
    if (node.leaf()) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) best.Offer(SquaredDistance(q, point(order[i])), order[i]);
      return;
    }
    // Left subtree holds coordinates <= split, right holds >= split, so the
    // rounded plane gap bounds every far-side distance from below.
    const float gap = q[node.split_dim] - node.split_value;
    const std::int32_t near = gap <= 0.0f ? node.left : node.right;
    const std::int32_t far = gap <= 0.0f ? node.right : node.left;
    SearchKd(near, q, best);
    if (static_cast<double>(gap) * static_cast<double>(gap) <= best.distance) SearchKd(far, q, best);
  }

  // Binary32 squared distances of up to kLanes queries against points
  // [block, block + len) of the channel-major copy, summed in channel order.
  static constexpr std::size_t kLanes = 8;
  static constexpr std::size_t kChunk = 16;
  typedef float Vec __attribute__((vector_size(kChunk * sizeof(float))));

  // `lane_major` holds the same queries as dim x kLanes, zero padded. Writes
  // the per-lane minimum over the block to `mins`.
  void ScreenBlock(const float* queries, const float* lane_major, std::size_t lanes, std::size_t block,
                   std::size_t len, float (*acc)[kBlockSize], float* mins) const {
    const std::size_t n = size();
    const float inf = std::numeric_limits<float>::infinity();
    Vec vmin[kLanes];
    for (Vec& m : vmin) m = Vec{} + inf;
    std::size_t p0 = 0;
    for (; p0 + kChunk <= len; p0 += kChunk) {
      Vec a[kLanes] = {};
      for (std::size_t c = 0; c < dim; ++c) {
        Vec column;
        std::memcpy(&column, columns.data() + c * n + block + p0, sizeof(Vec));
        for (std::size_t l = 0; l < kLanes; ++l) {
          const Vec t = lane_major[c * kLanes + l] - column;
          a[l] += t * t;
        }
      }
      for (std::size_t l = 0; l < lanes; ++l) {
        std::memcpy(acc[l] + p0, &a[l], sizeof(Vec));
        vmin[l] = a[l] < vmin[l] ? a[l] : vmin[l];
      }
    }
    for (std::size_t l = 0; l < lanes; ++l) {
      mins[l] = inf;
      for (std::size_t j = 0; j < kChunk; ++j) mins[l] = std::min(mins[l], vmin[l][j]);
      for (std::size_t p = p0; p < len; ++p) {
        float sum = 0.0f;
        for (std::size_t c = 0; c < dim; ++c) {
          const float t = queries[l * dim + c] - columns[c * n + block + p];
          sum += t * t;
        }
        acc[l][p] = sum;
        mins[l] = std::min(mins[l], sum);
      }
    }
  }

  // Screens each block in binary32, then re-ranks every candidate whose
  // screened value could still beat the running minimum with SquaredDistance.
  void ScanTile(std::span<const float> queries, std::size_t count, std::uint32_t* out) const {
    const std::size_t n = size();
    std::array<Best, kQueryTile> best{};
    std::array<float, kQueryTile> approx_min;
    approx_min.fill(std::numeric_limits<float>::infinity());
    alignas(64) float acc[kLanes][kBlockSize];
    std::vector<float> lane_major(((count + kLanes - 1) / kLanes) * kLanes * dim, 0.0f);
    for (std::size_t qi = 0; qi < count; ++qi) {
      for (std::size_t c = 0; c < dim; ++c) {
        lane_major[(qi / kLanes) * kLanes * dim + c * kLanes + qi % kLanes] = queries[qi * dim + c];
      }
    }

    for (std::size_t block = 0; block < n; block += kBlockSize) {
      const std::size_t len = std::min(kBlockSize, n - block);
      for (std::size_t q0 = 0; q0 < count; q0 += kLanes) {
        const std::size_t lanes = std::min(kLanes, count - q0);
        float mins[kLanes];
        ScreenBlock(queries.data() + q0 * dim, lane_major.data() + q0 * dim, lanes, block, len, acc, mins);
        for (std::size_t l = 0; l < lanes; ++l) {
          const std::size_t qi = q0 + l;
          const float block_min = mins[l];
          approx_min[qi] = std::min(approx_min[qi], block_min);
          const float threshold = approx_min[qi] * (1.0f + approx_tolerance) + 1e-30f;
          if (block_min > threshold) continue;
          const std::span<const float> qspan(queries.data() + qi * dim, dim);
          for (std::size_t p = 0; p < len; ++p) {
            if (acc[l][p] <= threshold) {
              const auto id = static_cast<std::uint32_t>(block + p);
              best[qi].Offer(SquaredDistance(qspan, point(id)), id);
            }
          }
        }
      }
    }
    for (std::size_t qi = 0; qi < count; ++qi) out[qi] = linear_ids[best[qi].id];
  }

  std::uint32_t QueryOne(std::span<const float> q) const {
    if (backend == NNBackend::kKdTree) {
      Best best;
      SearchKd(0, q, best);
      return linear_ids[best.id];
    }
    std::uint32_t out = 0;
    ScanTile(q, 1, &out);
    return out;
  }
};

namespace {

void CheckFinite(std::span<const float> xs) {
  for (float x : xs) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kNonFinite, "query vector has a non-finite component");
  }
}

void CheckBackend(NNBackend backend, std::uint32_t dim) {
  if (backend == NNBackend::kKdTree && dim > kMaxKdTreeDim) {
    throw Error(ErrorCode::kBackendMismatch, "kd-tree backend supports d <= " + std::to_string(kMaxKdTreeDim) +
                                                 ", got d = " + std::to_string(dim));
  }
}

}  // namespace

NNIndex NNIndex::Build(const DescriptorGrid& grid, NNBackend backend) {
  CheckBackend(backend, grid.dim());
  auto impl = std::make_shared<Impl>();
  impl->backend = backend;
  impl->dim = grid.dim();
  impl->shape = grid.shape();
  impl->linear_ids.resize(grid.pixel_count());
  std::iota(impl->linear_ids.begin(), impl->linear_ids.end(), 0u);
  impl->points.assign(grid.data().begin(), grid.data().end());
  if (backend == NNBackend::kKdTree) {
    impl->order = impl->linear_ids;
    impl->BuildKd(0, static_cast<std::uint32_t>(impl->size()));
  } else {
    impl->BuildColumns();
  }
  return NNIndex(std::move(impl));
}

NNIndex NNIndex::Build(const PointMap& map, NNBackend backend) {
  CheckBackend(backend, 3);
  auto impl = std::make_shared<Impl>();
  impl->backend = backend;
  impl->dim = 3;
  impl->shape = map.shape();
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    if (!map.valid(i)) continue;
    impl->linear_ids.push_back(static_cast<std::uint32_t>(i));
    const auto p = map.point(i);
    impl->points.insert(impl->points.end(), p.begin(), p.end());
  }
  if (impl->linear_ids.empty()) throw Error(ErrorCode::kNoValidPixels, "pointmap has no valid pixels to index");
  std::vector<std::uint32_t> ids(impl->size());
  std::iota(ids.begin(), ids.end(), 0u);
  if (backend == NNBackend::kKdTree) {
    impl->order = std::move(ids);
    impl->BuildKd(0, static_cast<std::uint32_t>(impl->size()));
  } else {
    impl->BuildColumns();
  }
  return NNIndex(std::move(impl));
}

NNBackend NNIndex::backend() const { return impl_->backend; }
std::uint32_t NNIndex::dim() const { return impl_->dim; }
GridShape NNIndex::shape() const { return impl_->shape; }
std::size_t NNIndex::size() const { return impl_->size(); }

std::uint32_t NNIndex::QueryLinear(std::span<const float> x) const {
  if (x.size() != impl_->dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query has " + std::to_string(x.size()) + " components, index has d = " + std::to_string(impl_->dim));
  }
  CheckFinite(x);
  return impl_->QueryOne(x);
}

PixelCoord NNIndex::Query(std::span<const float> x) const { return impl_->shape.pixel(QueryLinear(x)); }

std::vector<std::uint32_t> NNIndex::BatchQueryLinear(std::span<const float> xs) const {
  const std::size_t d = impl_->dim;
  if (xs.size() % d != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "batch length " + std::to_string(xs.size()) +
                                                   " is not a multiple of d = " + std::to_string(d));
  }
  CheckFinite(xs);
  const std::size_t n = xs.size() / d;
  std::vector<std::uint32_t> out(n);
  if (impl_->backend == NNBackend::kKdTree) {
    ParallelFor(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out[i] = impl_->QueryOne(xs.subspan(i * d, d));
    });
  } else {
    const std::size_t tiles = (n + kQueryTile - 1) / kQueryTile;
    ParallelFor(
        tiles,
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t t = begin; t < end; ++t) {
            const std::size_t first = t * kQueryTile;
            const std::size_t count = std::min(kQueryTile, n - first);
            impl_->ScanTile(xs.subspan(first * d, count * d), count, out.data() + first);
          }
        },
        1);
  }
  return out;
}

std::vector<PixelCoord> NNIndex::BatchQuery(std::span<const float> xs) const {
  const auto linear = BatchQueryLinear(xs);
  std::vector<PixelCoord> out(linear.size());
  std::transform(linear.begin(), linear.end(), out.begin(), [&](std::uint32_t i) { return impl_->shape.pixel(i); });
  return out;
}

}  // namespace recimatch
