// Copyright 2026 The pvroute Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pvroute/case_base.h"

namespace pvroute {
namespace {

constexpr std::size_t kDim = 8;

CaseBase MakeBase(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Case> cases(n);
  for (std::size_t i = 0; i < n; ++i) {
    cases[i].key.resize(kDim);
    for (double& x : cases[i].key) x = g(rng);
    cases[i].trajectory = HorizonVector::Constant(4, 0.5);
    cases[i].end_slot = static_cast<std::int64_t>(i);
  }
  CaseBase base(kDim);
  base.InsertBatch(std::move(cases));
  return base;
}

// k = 8 query over a base of `range(0)` cases, all eligible.
void BM_Nearest(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const CaseBase base = MakeBase(static_cast<std::size_t>(state.range(0)), rng);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> queries(256, std::vector<double>(kDim));
  for (auto& q : queries)
    for (double& x : q) x = g(rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        base.Nearest(queries[i++ % queries.size()], 8, state.range(0)));
  }
}
BENCHMARK(BM_Nearest)->Arg(1000)->Arg(10000)->Arg(100000);

// Temporal cutoff at half the base.
void BM_NearestCutoff(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const CaseBase base = MakeBase(static_cast<std::size_t>(state.range(0)), rng);
  std::vector<double> q(kDim, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(base.Nearest(q, 8, state.range(0) / 2));
  }
}
BENCHMARK(BM_NearestCutoff)->Arg(10000)->Arg(100000);

void BM_InsertBatch(benchmark::State& state) {
  for (auto _ : state) {
    std::mt19937_64 rng(4);
    benchmark::DoNotOptimize(MakeBase(static_cast<std::size_t>(state.range(0)), rng));
  }
}
BENCHMARK(BM_InsertBatch)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace pvroute
