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

#include <algorithm>
#include <random>

#include "pvroute/errors.h"
#include "pvroute/router.h"

namespace pvroute {
namespace {

NodeLatency SmallLatency() {
  NodeLatency l;
  l.tau_e = 2;
  l.tau_s = 5;
  l.tau_f = 1;
  l.tau_up = 3;
  l.tau_down = 2;
  return l;
}

CongestionCurve Flat(double v) {
  CongestionCurve c;
  c.d0 = v;
  c.d1 = 0.0;
  return c;
}

TEST(ModeLatency, HandArithmetic) {
  const NodeLatency l = SmallLatency();
  EXPECT_EQ(ModeLatency(l, 6, Flat(4), Mode::kExpertOnly, 0.3), 2.0);
  EXPECT_EQ(ModeLatency(l, 6, Flat(4), Mode::kEdgeFusion, 0.3), 8.0);
  EXPECT_EQ(ModeLatency(l, 6, Flat(4), Mode::kCloudAssisted, 0.3), 18.0);
  // tau_s dominates the max when the cloud path is short.
  NodeLatency slow = l;
  slow.tau_s = 40;
  EXPECT_EQ(ModeLatency(slow, 6, Flat(4), Mode::kCloudAssisted, 0.3), 43.0);
}

TEST(CongestionCurve, AffineAndSharpened) {
  CongestionCurve c;
  EXPECT_EQ(c(0.5), 10.0 + 60.0 * 0.5);
  c.kind = CongestionCurve::Kind::kSharpened;
  EXPECT_NEAR(c(0.5), 10.0 + 60.0 * 0.5 / 0.55, 1e-12);
  EXPECT_EQ(CongestionKindFromName(CongestionKindName(c.kind)), c.kind);
}

TEST(Pricing, HandKappa2) {
  QueueState q;
  q.q_tau = 2;
  q.q_c = 1;
  q.q_rho = 4;
  // tau2 - tau1 = 18 - 8 = 10.
  const PricingTerms p = Pricing(q, SmallLatency(), 6, Flat(4), 3);
  EXPECT_NEAR(p.Kappa2(0.3), 27.0, 1e-12);
  EXPECT_NEAR(p.kappa1, 2.0 * (8 - 2), 1e-12);
}

TEST(ComputeIndices, FreeCloudIsUsed) {
  const PricingTerms p = Pricing({}, SmallLatency(), 6, Flat(4), 3);
  const GainCurves g = MakeGainCurves(StepFunction::Constant(0.1), StepFunction::Constant(0.05));
  const RoutingIndices j = ComputeIndices(p, g, 0.5, 80, 0.0);
  EXPECT_EQ(j.j0, 0.0);
  EXPECT_NEAR(j.j1, -0.1, 1e-15);
  EXPECT_NEAR(j.j2, -0.15, 1e-15);
  EXPECT_EQ(j.Argmin(), Mode::kCloudAssisted);
}

TEST(ComputeIndices, PricedWithoutGains) {
  PricingTerms p;
  p.kappa1 = 4;
  p.fixed2 = 27;
  const GainCurves g = MakeGainCurves(StepFunction::Constant(0), StepFunction::Constant(0));
  const RoutingIndices j = ComputeIndices(p, g, 0.5, 80, 0.0);
  EXPECT_NEAR(j.j1, 0.05, 1e-15);
  EXPECT_NEAR(j.j2, 0.3875, 1e-15);
  EXPECT_EQ(j.Argmin(), Mode::kExpertOnly);
}

TEST(RoutingIndices, TiesGoToLowerMode) {
  EXPECT_EQ((RoutingIndices{0.0, 0.0, 0.0}).Argmin(), Mode::kExpertOnly);
  EXPECT_EQ((RoutingIndices{0.0, -1.0, -1.0}).Argmin(), Mode::kEdgeFusion);
}

TEST(Thresholds, StepScan) {
  PricingTerms p;
  p.kappa1 = 4;  // kappa1 / V = 0.05
  p.fixed2 = 1e9;
  const GainCurves g1 = MakeGainCurves(StepFunction({0.0, 0.5}, {0.0, 0.1}), StepFunction::Constant(0));
  const ThresholdSet t = Thresholds(p, g1, 80, 0.0);
  EXPECT_EQ(t.theta01, 0.5);
  EXPECT_EQ(t.theta_c, kInfiniteThreshold);
}

TEST(PartitionMode, RegionsFollowThresholds) {
  ThresholdSet t;
  t.theta01 = 0.3;
  t.theta12 = 0.7;
  t.theta02 = 0.6;
  t.theta_c = 0.7;
  EXPECT_EQ(PartitionMode(t, 0.1), Mode::kExpertOnly);
  EXPECT_EQ(PartitionMode(t, 0.5), Mode::kEdgeFusion);
  EXPECT_EQ(PartitionMode(t, 0.7), Mode::kCloudAssisted);
  EXPECT_EQ(PartitionMode(t, 0.95), Mode::kCloudAssisted);
}

StepFunction RandomStep(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = 1 + static_cast<int>(u(rng) * 5);
  std::vector<double> b, v;
  double x = 0.0, y = (u(rng) - 0.7) * scale;
  for (int i = 0; i < k; ++i) {
    x += 0.05 + u(rng) * 0.3;
    y += u(rng) * scale;
    b.push_back(x);
    v.push_back(y);
  }
  return StepFunction(b, v);
}

TEST(SelectActions, MatchesBruteForceArgmin) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const GainCurves g = MakeGainCurves(RandomStep(rng, 0.05), RandomStep(rng, 0.05));
    QueueState q{u(rng) * 0.05, u(rng), u(rng)};
    NodeLatency lat;
    NodeRoutingInput in;
    in.gains = &g;
    in.pricing = Pricing(q, lat, 40, CongestionCurve{}, 1.0);
    const double rho = u(rng), V = 1 + 100 * u(rng);
    for (int k = 0; k <= 100; ++k) {
      in.score = k / 100.0;
      const auto d = SelectActions({in}, rho, V);
      const Mode brute = ComputeIndices(in.pricing, g, in.score, V, rho).Argmin();
      ASSERT_EQ(d.nodes[0].mode, brute) << "trial " << trial << " score " << in.score;
    }
  }
}

TEST(IterateFixedPoint, ConstantMapOneStep) {
  // theta_c = 0.8 under a uniform CDF: T(rho) = 0.2.
  for (double init : {0.0, 0.5, 1.0}) {
    const auto r = IterateFixedPoint([](double) { return 1.0 - 0.8; }, init, 1, 1.0);
    EXPECT_NEAR(r.rho, 0.2, 1e-15);
    EXPECT_EQ(r.iterates.size(), 2u);
  }
}

TEST(IterateFixedPoint, ContractionConverges) {
  const auto map = [](double rho) { return 1.0 - std::clamp(0.5 + 0.4 * rho, 0.0, 1.0); };
  const auto r = IterateFixedPoint(map, 0.0, 20, 1.0);
  EXPECT_NEAR(r.rho, 0.5 / 1.4, 1e-6);
  EXPECT_LT(r.residual, 1e-6);
}

TEST(MeanFieldMap, UniformScoresHandValue) {
  const GainCurves g =
      MakeGainCurves(StepFunction::Constant(0.1), StepFunction({0.0, 0.6}, {-0.1, 0.2}));
  ScoreCdf cdf(1.0, 100);
  for (int k = 0; k < 10; ++k) cdf.Update(k / 10.0 + 0.05);
  NodeRoutingInput in;
  in.gains = &g;
  in.cdf = &cdf;
  // theta12 = 0.6 with zero prices; 4 of 10 scores lie above.
  EXPECT_NEAR(MeanFieldMap({in, in}, 80, 0.3), 0.4, 1e-12);
}

TEST(Route, ZeroQueuesAllEscalate) {
  const GainCurves g = MakeGainCurves(StepFunction::Constant(0.1), StepFunction::Constant(0.05));
  ScoreCdf cdf;
  NodeRoutingInput in;
  in.gains = &g;
  in.cdf = &cdf;
  in.score = 0.2;
  const auto d = Route({in, in, in}, ControllerConfig{}, 0.0);
  for (const auto& n : d.nodes) EXPECT_EQ(n.mode, Mode::kCloudAssisted);
}

TEST(ControllerConfig, Validation) {
  ControllerConfig c;
  c.V = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.damping = 1.5;
  EXPECT_THROW(c.Validate(), ConfigError);
}

}  // namespace
}  // namespace pvroute
