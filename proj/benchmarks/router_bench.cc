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

#include "pvroute/router.h"

namespace pvroute {
namespace {

GainCurves Gains() {
  std::vector<double> b, v1, v2;
  for (int k = 1; k <= 16; ++k) {
    b.push_back(k / 17.0);
    v1.push_back(-0.02 + 0.003 * k);
    v2.push_back(-0.03 + 0.004 * k);
  }
  return MakeGainCurves(StepFunction(b, v1), StepFunction(b, v2));
}

// One routing decision over `range(0)` nodes.
void BM_SelectActions(benchmark::State& state) {
  const GainCurves gains = Gains();
  QueueState q;
  q.q_tau = 0.02;
  q.q_c = 0.4;
  q.q_rho = 0.1;
  const NodeLatency lat;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<NodeRoutingInput> nodes(static_cast<std::size_t>(state.range(0)));
  for (NodeRoutingInput& n : nodes) {
    n.score = u(rng);
    n.gains = &gains;
    n.pricing = Pricing(q, lat, 40.0, CongestionCurve{}, 0.5);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(SelectActions(nodes, 0.3, 80.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectActions)->Arg(8)->Arg(64)->Arg(512);

void BM_FixedPoint(benchmark::State& state) {
  const auto map = [](double rho) { return 0.5 - 0.4 * rho; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(IterateFixedPoint(map, 0.0, 20, 1.0));
  }
}
BENCHMARK(BM_FixedPoint);

}  // namespace
}  // namespace pvroute
