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

#ifndef PVROUTE_SYNTH_H_
#define PVROUTE_SYNTH_H_

#include <array>
#include <cstdint>
#include <vector>

#include "pvroute/data.h"

namespace pvroute {

// Hidden cloud regimes of the synthetic generator.
enum class Regime : int { kCalm = 0, kBroken = 1, kOvercast = 2 };

// Multi-site PV scenario: a clear-sky diurnal curve per site, attenuated by a
// hidden Markov cloud regime with fast level changes (ramps) and broken-cloud
// fluctuations. Two covariates are emitted: cloud_cover, which leads the
// attenuation by `weather_lead` slots, and temperature.
struct SyntheticConfig {
  int nodes = 8;
  int slots = 10000;  // rows per node
  int slots_per_day = 96;
  std::int64_t start = 1704067200;  // 2024-01-01T00:00:00Z
  // Per-slot probability of drawing the next regime from `transition`.
  double hazard = 0.01;
  std::array<std::array<double, 3>, 3> transition = {{{0.5, 0.35, 0.15},
                                                      {0.8, 0.1, 0.1},
                                                      {0.8, 0.1, 0.1}}};
  int initial_regime = 0;
  double ramp_magnitude = 0.3;
  double noise = 0.02;
  double capacity_min = 50.0;
  double capacity_max = 150.0;
  int weather_lead = 4;

  // Throws ConfigError.
  void Validate() const;
};

// Deterministic for a fixed (config, seed). Site shapes and capacities depend
// on the node index only, so a noiseless calm scenario is seed-independent.
std::vector<RawSeries> Synthesize(const SyntheticConfig& config,
                                  std::uint64_t seed);

}  // namespace pvroute

#endif  // PVROUTE_SYNTH_H_
