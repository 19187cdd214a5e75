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

#include "pvroute/queues.h"

#include <cmath>

#include "pvroute/errors.h"

namespace pvroute {

void Budgets::Validate() const {
  if (!(tau_max > 0.0) || !(c_max > 0.0) || !(rho_max > 0.0)) {
    throw ConfigError("budgets must be positive");
  }
  if (rho_max > 1.0) throw ConfigError("rho_max must be <= 1");
}

QueueState UpdateQueues(const QueueState& state, const Arrivals& arrivals,
                        const Budgets& budgets) {
  for (double a : arrivals.AsArray()) {
    if (!std::isfinite(a) || a < 0.0) {
      throw DataError("queue arrivals must be finite and >= 0");
    }
  }
  if (arrivals.rho > 1.0) throw DataError("rho must lie in [0, 1]");
  QueueState next;
  next.q_tau = Hinge(state.q_tau + arrivals.latency - budgets.tau_max);
  next.q_c = Hinge(state.q_c + arrivals.comm - budgets.c_max);
  next.q_rho = Hinge(state.q_rho + arrivals.rho - budgets.rho_max);
  next.slot = state.slot + 1;
  return next;
}

double LyapunovValue(const QueueState& state) {
  return 0.5 * (state.q_tau * state.q_tau + state.q_c * state.q_c +
                state.q_rho * state.q_rho);
}

StabilityReport ComputeStability(const std::vector<QueueState>& states,
                                 const std::vector<Arrivals>& arrivals,
                                 const Budgets& budgets,
                                 double rate_tolerance) {
  if (states.size() != arrivals.size()) {
    throw DimensionError("stability: states and arrivals differ in length");
  }
  StabilityReport report;
  report.slots = static_cast<std::int64_t>(states.size());
  if (states.empty()) {
    report.bound_holds = {true, true, true};
    return report;
  }
  const double T = static_cast<double>(states.size());
  const auto budget = budgets.AsArray();
  const auto final_q = states.back().AsArray();
  // Extended-precision sums keep the bound check free of accumulation error.
  std::array<long double, 3> arrival_sum{}, backlog_sum{};
  for (std::size_t t = 0; t < states.size(); ++t) {
    const auto a = arrivals[t].AsArray();
    const auto q = states[t].AsArray();
    for (int g = 0; g < 3; ++g) {
      arrival_sum[g] += a[g];
      backlog_sum[g] += q[g];
    }
  }
  for (int g = 0; g < 3; ++g) {
    report.avg_arrival[g] = static_cast<double>(arrival_sum[g] / T);
    report.avg_backlog[g] = static_cast<double>(backlog_sum[g] / T);
    report.final_rate[g] = final_q[g] / T;
    report.certified_bound[g] = budget[g] + report.final_rate[g];
    report.bound_holds[g] =
        report.avg_arrival[g] <= report.certified_bound[g] + 1e-12;
    report.avg_total_backlog += report.avg_backlog[g];
    if (report.final_rate[g] > rate_tolerance * budget[g]) {
      report.unstable = true;
    }
  }
  return report;
}

}  // namespace pvroute
