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


#include <benchmark/benchmark.h>

#include <vector>

#include "recimatch/nn_index.h"
#include "recimatch/synth.h"

namespace {

using recimatch::GenerateRandomGrids;
using recimatch::NNBackend;
using recimatch::NNIndex;

void BM_BuildBruteForce(benchmark::State& state) {
  const auto side = static_cast<std::uint32_t>(state.range(0));
  const auto grids = GenerateRandomGrids(side, side, 24, 1);
  for (auto _ : state) {
    NNIndex index = NNIndex::Build(grids.second, NNBackend::kBruteForce);
    benchmark::DoNotOptimize(index);
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_BuildBruteForce)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BatchQueryBruteForce(benchmark::State& state) {
  const auto side = static_cast<std::uint32_t>(state.range(0));
  const auto grids = GenerateRandomGrids(side, side, 24, 2);
  const NNIndex index = NNIndex::Build(grids.second, NNBackend::kBruteForce);
  const std::size_t n = 1000;
  const auto all = grids.first.data();
  const std::vector<float> queries(all.begin(), all.begin() + n * grids.first.dim());
  for (auto _ : state) {
    auto result = index.BatchQueryLinear(queries);
    benchmark::DoNotOptimize(result.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BatchQueryBruteForce)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BatchQueryKdTree(benchmark::State& state) {
  const auto side = static_cast<std::uint32_t>(state.range(0));
  const auto grids = GenerateRandomGrids(side, side, 3, 3);
  const NNIndex index = NNIndex::Build(grids.second, NNBackend::kKdTree);
  const std::size_t n = 1000;
  const auto all = grids.first.data();
  const std::vector<float> queries(all.begin(), all.begin() + n * grids.first.dim());
  for (auto _ : state) {
    auto result = index.BatchQueryLinear(queries);
    benchmark::DoNotOptimize(result.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BatchQueryKdTree)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
