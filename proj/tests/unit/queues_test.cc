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

#include <gtest/gtest.h>

#include "pvroute/errors.h"
#include "pvroute/queues.h"

namespace pvroute {
namespace {

TEST(UpdateQueues, HingeArithmetic) {
  QueueState q;
  q.q_tau = 5;
  const QueueState next = UpdateQueues(q, {130, 0.1, 0.2}, Budgets{});
  EXPECT_EQ(next.q_tau, 15.0);
  EXPECT_EQ(next.q_c, 0.0);
  EXPECT_EQ(next.q_rho, 0.0);
  EXPECT_EQ(next.slot, 1);
}

TEST(UpdateQueues, RejectsInvalidArrivals) {
  EXPECT_THROW(UpdateQueues({}, {-1, 0, 0}, Budgets{}), DataError);
  EXPECT_THROW(UpdateQueues({}, {0, 0, 1.5}, Budgets{}), DataError);
}

TEST(Budgets, Validation) {
  Budgets b;
  b.rho_max = 1.5;
  EXPECT_THROW(b.Validate(), ConfigError);
  b = {};
  b.c_max = 0.0;
  EXPECT_THROW(b.Validate(), ConfigError);
}

TEST(LyapunovValue, HalfSumOfSquares) {
  QueueState q;
  q.q_tau = 3;
  q.q_c = 4;
  EXPECT_EQ(LyapunovValue(q), 12.5);
}

TEST(ComputeStability, ConstantExcessGrowsLinearly) {
  const Budgets b;
  std::vector<QueueState> states;
  std::vector<Arrivals> arrivals;
  QueueState q;
  const Arrivals a{b.tau_max + 2.0, 0.0, 1.0};
  for (int t = 0; t < 50; ++t) {
    q = UpdateQueues(q, a, b);
    states.push_back(q);
    arrivals.push_back(a);
  }
  EXPECT_NEAR(q.q_tau, 50 * 2.0, 1e-9);
  EXPECT_NEAR(q.q_rho, 50 * (1.0 - b.rho_max), 1e-9);
  const StabilityReport r = ComputeStability(states, arrivals, b);
  EXPECT_TRUE(r.unstable);
  EXPECT_NEAR(r.final_rate[0], 2.0, 1e-9);
  for (bool ok : r.bound_holds) EXPECT_TRUE(ok);
}

TEST(ComputeStability, ThreeSlotHandTrace) {
  Budgets b;
  b.tau_max = 10;
  b.c_max = 1;
  b.rho_max = 0.5;
  // Latency arrivals 15, 5, 12: Q = 5, 0, 2. Average 32/3 <= 10 + 2/3.
  const std::vector<Arrivals> a = {{15, 0, 0}, {5, 0, 0}, {12, 0, 0}};
  std::vector<QueueState> s;
  QueueState q;
  for (const auto& x : a) s.push_back(q = UpdateQueues(q, x, b));
  EXPECT_EQ(s[0].q_tau, 5.0);
  EXPECT_EQ(s[1].q_tau, 0.0);
  EXPECT_EQ(s[2].q_tau, 2.0);
  const StabilityReport r = ComputeStability(s, a, b);
  EXPECT_NEAR(r.avg_arrival[0], 32.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.certified_bound[0], 10.0 + 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(r.bound_holds[0]);
  EXPECT_NEAR(r.avg_backlog[0], 7.0 / 3.0, 1e-12);
  // Q(T)/T = 2/3 sits above 5% of the budget but below 10%.
  EXPECT_TRUE(r.unstable);
  EXPECT_FALSE(ComputeStability(s, a, b, 0.1).unstable);
}

}  // namespace
}  // namespace pvroute
