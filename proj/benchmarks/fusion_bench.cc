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

#include "pvroute/fusion.h"
#include "pvroute/loss.h"

namespace pvroute {
namespace {

// One FTRL round: weights, fusion and the subgradient update.
void BM_FtrlRound(benchmark::State& state) {
  const std::size_t H = static_cast<std::size_t>(state.range(0));
  FusionConfig config;
  CumulativeGradient gamma(1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto vec = [&] {
    std::vector<double> v(H);
    for (double& x : v) x = u(rng);
    return HorizonVector(v);
  };
  const HorizonVector target = vec();
  const Candidates candidates = {
      {Branch::kExpert, vec()}, {Branch::kSmall, vec()}, {Branch::kCloud, vec()}};
  for (auto _ : state) {
    const SimplexWeights w = FusionWeights(config, gamma, 0, Mode::kCloudAssisted);
    benchmark::DoNotOptimize(FuseCandidates(candidates, w));
    gamma.Add(0, Mode::kCloudAssisted, LossSubgradientWeights(target, candidates, w));
  }
}
BENCHMARK(BM_FtrlRound)->Arg(4)->Arg(16);

}  // namespace
}  // namespace pvroute
