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

#ifndef PVROUTE_QUEUES_H_
#define PVROUTE_QUEUES_H_

#include <array>
#include <cstdint>
#include <vector>

namespace pvroute {

struct Budgets {
  double tau_max = 120.0;
  double c_max = 0.3;
  double rho_max = 0.5;

  // Throws ConfigError unless all are positive and rho_max <= 1.
  void Validate() const;
  std::array<double, 3> AsArray() const { return {tau_max, c_max, rho_max}; }
};

struct QueueState {
  double q_tau = 0.0;
  double q_c = 0.0;
  double q_rho = 0.0;
  std::int64_t slot = 0;

  std::array<double, 3> AsArray() const { return {q_tau, q_c, q_rho}; }
  friend bool operator==(const QueueState&, const QueueState&) = default;
};

// Per-slot network-average arrivals into the three queues.
struct Arrivals {
  double latency = 0.0;
  double comm = 0.0;
  double rho = 0.0;

  std::array<double, 3> AsArray() const { return {latency, comm, rho}; }
};

inline double Hinge(double x) { return x > 0.0 ? x : 0.0; }

// q <- [q + arrival - budget]^+ per queue; slot incremented. Throws
// DataError on negative or non-finite arrivals or rho outside [0, 1].
QueueState UpdateQueues(const QueueState& state, const Arrivals& arrivals,
                        const Budgets& budgets);

double LyapunovValue(const QueueState& state);

struct StabilityReport {
  std::int64_t slots = 0;
  std::array<double, 3> final_rate{};       // Q_g(T) / T
  std::array<double, 3> avg_arrival{};      // time average of arrivals
  std::array<double, 3> certified_bound{};  // budget_g + Q_g(T) / T
  std::array<bool, 3> bound_holds{};        // avg_arrival <= bound (+1e-12)
  std::array<double, 3> avg_backlog{};      // sum_t Q_g(t) / T per queue
  double avg_total_backlog = 0.0;           // sum over the three queues
  // Q_g(T)/T exceeds `rate_tolerance` * budget_g for some queue.
  bool unstable = false;
};

// `states[t]` is the queue state after slot t's update and `arrivals[t]`
// the arrivals of slot t; the run starts from the zero state.
StabilityReport ComputeStability(const std::vector<QueueState>& states,
                                 const std::vector<Arrivals>& arrivals,
                                 const Budgets& budgets,
                                 double rate_tolerance = 0.05);

}  // namespace pvroute

#endif  // PVROUTE_QUEUES_H_
