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

#include <cmath>
#include <random>

#include "pvroute/metrics.h"

namespace pvroute {
namespace {

TEST(Auroc, PairwiseHandValue) {
  const std::vector<double> s = {0.9, 0.3, 0.8};
  const std::vector<int> y = {1, 1, 0};
  EXPECT_NEAR(*Auroc(s, y), 0.5, 1e-15);
}

TEST(Auroc, TiesGetHalfCredit) {
  const std::vector<double> s = {0.5, 0.5};
  const std::vector<int> y = {1, 0};
  EXPECT_NEAR(*Auroc(s, y), 0.5, 1e-15);
  const std::vector<int> one = {1, 1};
  EXPECT_FALSE(Auroc(s, one).has_value());
}

TEST(Auprc, StepIntegration) {
  // Ranking: 0.9 (+), 0.8 (-), 0.3 (+): AP = 0.5 * 1 + 0.5 * 2/3.
  const std::vector<double> s = {0.9, 0.3, 0.8};
  const std::vector<int> y = {1, 1, 0};
  EXPECT_NEAR(*Auprc(s, y), 0.5 + 1.0 / 3.0, 1e-15);
  const std::vector<int> none = {0, 0, 0};
  EXPECT_FALSE(Auprc(s, none).has_value());
}

SlotTrace TwoRowTrace() {
  SlotTrace t;
  t.nodes = 2;
  t.horizon = 1;
  SlotRecord slot;
  slot.rho = 0.5;
  slot.arrivals = {40, 0.5, 0.5};
  slot.queues = UpdateQueues({}, slot.arrivals, t.budgets);
  t.slots.push_back(slot);
  NodeSlotRecord a, b;
  a.node = 0;
  a.mode = Mode::kCloudAssisted;
  a.revealed = true;
  a.abs_err = 0.02;
  a.sq_err = 0.0004;
  a.ood = true;
  a.score = 0.9;
  a.oracle_label = 1;
  b.node = 1;
  b.revealed = true;
  b.abs_err = 0.01;
  b.sq_err = 0.0001;
  b.score = 0.1;
  t.rows = {a, b};
  return t;
}

TEST(ComputeMetrics, DegradationRatioAndNmae) {
  const MetricReport m = ComputeMetrics(TwoRowTrace());
  EXPECT_NEAR(*m.dg, 2.0, 1e-12);
  EXPECT_NEAR(m.nmae, 1.5, 1e-12);
  EXPECT_NEAR(*m.ree, 2.0, 1e-12);
  EXPECT_NEAR(m.cloud_usage, 0.5, 1e-15);
  EXPECT_NEAR(*m.auroc, 1.0, 1e-15);
  EXPECT_EQ(m.evaluated, 2u);
}

TEST(ComputeMetrics, TercilesAreWithinNode) {
  SlotTrace t;
  t.nodes = 2;
  t.horizon = 1;
  t.slots.resize(3);
  // Node 0 scores far below node 1; each escalates only its top score.
  for (int k = 0; k < 3; ++k) {
    for (int n = 0; n < 2; ++n) {
      NodeSlotRecord r;
      r.slot = k;
      r.node = n;
      r.score = 0.1 * k + 0.5 * n;
      r.mode = k == 2 ? Mode::kCloudAssisted : Mode::kExpertOnly;
      t.rows.push_back(r);
    }
  }
  const MetricReport m = ComputeMetrics(t);
  EXPECT_EQ(m.tercile_cloud_share[0], 0.0);
  EXPECT_EQ(m.tercile_cloud_share[1], 0.0);
  EXPECT_EQ(m.tercile_cloud_share[2], 1.0);
}

TEST(MetricColumns, FixedOrderWithNaN) {
  const auto cols = MetricColumns(MetricReport{});
  EXPECT_EQ(cols.front().first, "nmae");
  bool saw_nan = false;
  for (const auto& [name, v] : cols) saw_nan |= std::isnan(v);
  EXPECT_TRUE(saw_nan);
}

}  // namespace
}  // namespace pvroute
