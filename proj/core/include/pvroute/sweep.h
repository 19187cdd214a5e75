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

#ifndef PVROUTE_SWEEP_H_
#define PVROUTE_SWEEP_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pvroute/config.h"
#include "pvroute/metrics.h"
#include "pvroute/sim.h"

namespace pvroute {

// Axes: "V", "K", "rho_max", "tau_max", "N".
struct SweepSpec {
  std::string axis;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  Policy policy;
};

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::uint64_t seed = 0;
  MetricReport metrics;
  double avg_loss = 0.0;  // mean realized loss over revealed rows
};

// Copy of `config` with the axis parameter set. Throws ConfigError for an
// unknown axis or a value the axis cannot take.
RunConfig WithAxisValue(const RunConfig& config, const std::string& axis,
                        double value);

// One run per (value, seed), rows ordered by value then seed. Runs on the
// same seed share the prepared bundle unless the axis changes what prepare
// learns (K, N).
std::vector<SweepRow> RunSweep(const RunConfig& config, const SweepSpec& spec);

// Header `axis,value,seed,<MetricColumns...>,avg_loss`.
void WriteSweepCsv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace pvroute

#endif  // PVROUTE_SWEEP_H_
