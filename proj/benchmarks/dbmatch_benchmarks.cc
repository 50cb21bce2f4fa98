// Copyright 2026 The dbmatch Authors
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

#include "dbmatch/database.h"
#include "dbmatch/detection.h"
#include "dbmatch/matcher.h"
#include "dbmatch/packed_rows.h"
#include "dbmatch/probability.h"

namespace dbmatch {
namespace {

const Pmf kPs = Pmf::FromProbabilities({0.2, 0.5, 0.3});
const Channel kBsc = Channel::Symmetric(2, 0.1);

void BM_ConsecutiveHamming(benchmark::State& state) {
  const auto m = static_cast<std::uint64_t>(state.range(0));
  Xoshiro256 rng(1);
  const auto pattern = SamplePattern(50, kPs, rng);
  const auto d1 = GenerateUnlabeled(m, 50, Pmf::Uniform(2), StreamKey(2));
  const auto d2 = ApplyRepetitionNoise(d1, pattern, Labeling::Identity(m), kBsc, StreamKey(3));
  for (auto _ : state) benchmark::DoNotOptimize(ConsecutiveHamming(d2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_ConsecutiveHamming)->Arg(1000)->Arg(100000);

void BM_DeletionSearch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto strategy = state.range(1) == 0 ? DeletionSearch::kExhaustive
                                            : DeletionSearch::kDynamicProgramming;
  Xoshiro256 rng(4);
  const auto pattern = SamplePattern(n, kPs, rng);
  const SeedBatch seeds = GenerateSeeds(200, n, Pmf::Uniform(2), pattern, kBsc, StreamKey(5),
                                        StreamKey(6));
  const auto collapsed = CollapseRuns(seeds.g2, RunsFromPattern(pattern));
  const auto sigma = SymbolMap::Identity(2);
  DeletionSearchOptions options;
  options.strategy = strategy;
  options.search_cap = ~std::uint64_t{0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(DetectDeletions(seeds.g1, collapsed, sigma, options));
  }
}
BENCHMARK(BM_DeletionSearch)->Args({16, 0})->Args({16, 1})->Args({60, 1});

void BM_TypicalityScan(benchmark::State& state) {
  const auto m = static_cast<std::uint64_t>(state.range(0));
  const std::size_t n = 60;
  const TypicalityModel model(Pmf::Uniform(2), kPs, kBsc);
  Xoshiro256 rng(7);
  const auto pattern = SamplePattern(n, kPs, rng);
  const auto d1 = GenerateUnlabeled(m, n, Pmf::Uniform(2), StreamKey(8));
  const auto d2 = ApplyRepetitionNoise(SelectRows(d1, 0, 1), pattern, Labeling::Identity(1),
                                       kBsc, StreamKey(9));
  const MarkedDatabase marked(d2, pattern);
  const PackedRows packed = PackedRows::Pack(d1, 2);
  const ChunkTable source = SourceChunkTable(model, n, packed.bits());
  const RowScorer scorer(model, marked, 0, source, packed.bits());
  for (auto _ : state) {
    std::uint64_t accepted = 0;
    for (std::uint64_t r = 0; r < m; ++r) accepted += scorer.Accepts(packed.Row(r));
    benchmark::DoNotOptimize(accepted);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_TypicalityScan)->Arg(1 << 16);

void BM_RivalProbability(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const TypicalityModel model(Pmf::Uniform(2), kPs, kBsc);
  Xoshiro256 rng(10);
  const auto pattern = SamplePattern(n, kPs, rng);
  const auto d1 = GenerateUnlabeled(1, n, Pmf::Uniform(2), StreamKey(11));
  const auto d2 = ApplyRepetitionNoise(d1, pattern, Labeling::Identity(1), kBsc, StreamKey(12));
  const MarkedDatabase marked(d2, pattern);
  for (auto _ : state) benchmark::DoNotOptimize(IndependentAcceptanceProbability(model, marked, 0));
}
BENCHMARK(BM_RivalProbability)->Arg(60)->Arg(200);

void BM_Capacity(benchmark::State& state) {
  const int a = static_cast<int>(state.range(0));
  const Pmf p_s = Pmf::FromProbabilities({0.1, 0.3, 0.3, 0.2, 0.1});
  const Channel ch = Channel::Symmetric(a, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(Capacity(Pmf::Uniform(a), p_s, ch));
}
BENCHMARK(BM_Capacity)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
}  // namespace dbmatch

BENCHMARK_MAIN();
