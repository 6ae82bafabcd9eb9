// Copyright 2026 The Leakcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "leakcheck/calibration.h"
#include "leakcheck/random_embeddings.h"
#include "leakcheck/reference_engine.h"
#include "leakcheck/similarity_engine.h"
#include "leakcheck/tile_kernel.h"

namespace leakcheck {
namespace {

// Args: synthetic rows, real rows, dim, k.
void BM_TopKPairs(benchmark::State& state) {
  const EmbeddingSet s = RandomUnitSet("s", state.range(0), state.range(2), 1);
  const EmbeddingSet r = RandomUnitSet("r", state.range(1), state.range(2), 2);
  const auto k = static_cast<std::size_t>(state.range(3));
  for (auto _ : state) benchmark::DoNotOptimize(TopKPairs(s, r, k));
  state.counters["pairs/s"] = benchmark::Counter(
      static_cast<double>(state.range(0)) * static_cast<double>(state.range(1)),
      benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_TopKPairs)
    ->Args({1000, 5000, 512, 1500})
    ->Args({2000, 20000, 512, 1500})
    ->Args({2000, 20000, 64, 1500})
    ->Unit(benchmark::kMillisecond);

void BM_NaiveTopKPairs(benchmark::State& state) {
  const EmbeddingSet s = RandomUnitSet("s", state.range(0), state.range(2), 1);
  const EmbeddingSet r = RandomUnitSet("r", state.range(1), state.range(2), 2);
  const auto k = static_cast<std::size_t>(state.range(3));
  for (auto _ : state) benchmark::DoNotOptimize(NaiveTopKPairs(s, r, k));
  state.counters["pairs/s"] = benchmark::Counter(
      static_cast<double>(state.range(0)) * static_cast<double>(state.range(1)),
      benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_NaiveTopKPairs)->Args({1000, 5000, 512, 1500})->Unit(benchmark::kMillisecond);

void BM_NearestMatches(benchmark::State& state) {
  const EmbeddingSet s = RandomUnitSet("s", state.range(0), 512, 3);
  const EmbeddingSet r = RandomUnitSet("r", state.range(1), 512, 4);
  for (auto _ : state) benchmark::DoNotOptimize(FindNearestMatches(s, r));
  state.counters["pairs/s"] = benchmark::Counter(
      static_cast<double>(state.range(0)) * static_cast<double>(state.range(1)),
      benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_NearestMatches)->Args({2000, 20000})->Unit(benchmark::kMillisecond);

void BM_UniqueRealTopK(benchmark::State& state) {
  const EmbeddingSet s = RandomUnitSet("s", state.range(0), 512, 5);
  const EmbeddingSet r = RandomUnitSet("r", state.range(1), 512, 6);
  for (auto _ : state) benchmark::DoNotOptimize(UniqueRealTopK(s, r, 1500));
}
BENCHMARK(BM_UniqueRealTopK)->Args({2000, 20000})->Unit(benchmark::kMillisecond);

// One 256 x 4096 tile per iteration with each kernel the CPU supports.
void BM_TileKernel(benchmark::State& state, std::string kernel) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const EmbeddingSet q = RandomUnitSet("q", 256, dim, 7);
  const EmbeddingSet g = RandomUnitSet("g", 4096, dim, 8);
  std::vector<float> out(256 * 4096);
  for (auto _ : state) {
    TilePassUsing(kernel, MatrixView::Of(q), MatrixView::Of(g), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["pairs/s"] =
      benchmark::Counter(256.0 * 4096.0, benchmark::Counter::kIsIterationInvariantRate);
}

void BM_DeriveFarThreshold(benchmark::State& state) {
  BenchmarkScores scores;
  GaussianSource gauss(9);
  scores.impostor.resize(static_cast<std::size_t>(state.range(0)));
  for (double& x : scores.impostor) x = 0.05 * gauss.Next();
  for (auto _ : state) benchmark::DoNotOptimize(DeriveFarThreshold(scores, 1e-4));
}
BENCHMARK(BM_DeriveFarThreshold)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

const bool kTileKernelsRegistered = [] {
  for (std::string_view name : AvailableTileKernels()) {
    benchmark::RegisterBenchmark(("BM_TileKernel/" + std::string(name)).c_str(), BM_TileKernel,
                                 std::string(name))
        ->Arg(64)
        ->Arg(512)
        ->Unit(benchmark::kMicrosecond);
  }
  return true;
}();

}  // namespace
}  // namespace leakcheck

BENCHMARK_MAIN();
