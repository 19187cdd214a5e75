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
#include <map>
#include <random>
#include <tuple>

#include "pvroute/calibration.h"
#include "pvroute/errors.h"
#include "pvroute/isotonic.h"

namespace pvroute {
namespace {

// Isotonic fit by the max-min formula over block averages.
std::vector<double> MaxMinIsotonic(const std::vector<double>& y,
                                   const std::vector<double>& w) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -1e300;
    for (std::size_t j = 0; j <= i; ++j) {
      double worst = 1e300;
      for (std::size_t k = i; k < n; ++k) {
        double s = 0.0, m = 0.0;
        for (std::size_t t = j; t <= k; ++t) {
          s += w[t] * y[t];
          m += w[t];
        }
        worst = std::min(worst, s / m);
      }
      best = std::max(best, worst);
    }
    out[i] = best;
  }
  return out;
}

TEST(PavaFit, HandPooling) {
  const std::vector<double> x2 = {0, 1}, y2 = {3, 1}, w2 = {1, 1};
  EXPECT_EQ(PavaFit(x2, y2, w2), (std::vector<double>{2, 2}));
  const std::vector<double> x3 = {0, 1, 2}, y3 = {3, 1, 2}, w3 = {1, 1, 1};
  EXPECT_EQ(PavaFit(x3, y3, w3), (std::vector<double>{2, 2, 2}));
}

TEST(PavaFit, WeightedMatchesMaxMin) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 12;
    std::vector<double> x(n), y(n), w(n);
    for (int i = 0; i < n; ++i) {
      x[i] = i;
      y[i] = u(rng);
      w[i] = 0.1 + u(rng);
    }
    const auto fit = PavaFit(x, y, w);
    const auto oracle = MaxMinIsotonic(y, w);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(fit[i], oracle[i], 1e-12);
  }
}

TEST(PavaFit, RejectsBadInput) {
  const std::vector<double> x = {1, 0}, y = {0, 0}, w = {1, 1}, bad_w = {1, 0};
  EXPECT_THROW(PavaFit(x, y, w), DataError);
  const std::vector<double> xs = {0, 1};
  EXPECT_THROW(PavaFit(xs, y, bad_w), DataError);
  EXPECT_THROW(PavaFit({}, {}, {}), DataError);
}

TEST(StepFunction, EvaluationAndThresholds) {
  const StepFunction f({0.5, 0.8}, {0.0, 0.1});
  EXPECT_EQ(f(0.2), 0.0);
  EXPECT_EQ(f(0.5), 0.1 * 0.0);
  EXPECT_EQ(f(0.8), 0.1);
  EXPECT_EQ(f.FirstAtLeast(0.05), 0.8);
  EXPECT_EQ(f.FirstAtLeast(0.0), 0.0);
  EXPECT_EQ(f.FirstAtLeast(0.2), kInfiniteThreshold);
  EXPECT_EQ(f.FirstAbove(0.0), 0.8);
  EXPECT_THROW(StepFunction({0.5, 0.5}, {0.0, 1.0}), DataError);
}

TEST(StepFunction, SumIsPointwise) {
  const StepFunction a({0.2, 0.6}, {0.0, 1.0}), b({0.4}, {2.0});
  const StepFunction c = a + b;
  for (double s : {0.0, 0.2, 0.3, 0.4, 0.5, 0.6, 0.9}) EXPECT_EQ(c(s), a(s) + b(s));
}

TEST(FitIsotonic, TiesArePooled) {
  const std::vector<double> x = {0.1, 0.1, 0.5}, y = {0.0, 1.0, 0.2};
  const StepFunction f = FitIsotonic(x, y);
  // Tie pooled to 0.5, then 0.5 > 0.2 pools all three.
  EXPECT_NEAR(f(0.1), 0.4, 1e-15);
  EXPECT_NEAR(f(0.9), 0.4, 1e-15);
  EXPECT_TRUE(f.IsNondecreasing());
}

ReplayRecord Record(int node, double score, std::array<double, 3> loss) {
  ReplayRecord r;
  r.node = node;
  r.calibrated_score = score;
  r.loss = loss;
  r.oracle_label = OracleLabel(loss);
  return r;
}

TEST(ReplayLosses, CloudExactExpertOff) {
  // Expert +0.2 and small -0.2 cancel in the three-way average.
  const Candidates c = {{Branch::kExpert, {0.7}}, {Branch::kSmall, {0.3}}, {Branch::kCloud, {0.5}}};
  const auto loss = ReplayLosses({0.5}, c, {});
  EXPECT_NEAR(loss[0], 0.2, 1e-15);
  EXPECT_NEAR(loss[2], 0.0, 1e-15);
  EXPECT_EQ(OracleLabel(loss), 1);
}

TEST(ReplayLosses, ExpertExactCloudOff) {
  const Candidates c = {{Branch::kExpert, {0.5}}, {Branch::kSmall, {0.5}}, {Branch::kCloud, {0.8}}};
  const auto loss = ReplayLosses({0.5}, c, {});
  EXPECT_NEAR(loss[0], 0.0, 1e-15);
  EXPECT_NEAR(loss[2], 0.1, 1e-15);
  EXPECT_EQ(OracleLabel(loss), 0);
}

TEST(FitGainCurves, MatchesMonotoneLeastSquares) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ReplayRecord> replay;
  for (int i = 0; i < 50; ++i) {
    const double s = u(rng);
    replay.push_back(Record(0, s, {0.2 + 0.1 * s * u(rng), 0.2 - 0.05 * u(rng), 0.1 + 0.2 * u(rng)}));
  }
  const GainCurves g = FitGainCurves(replay);
  std::vector<ReplayRecord> sorted = replay;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.calibrated_score < b.calibrated_score;
  });
  std::vector<double> y1, y2, w(sorted.size(), 1.0);
  for (const auto& r : sorted) {
    y1.push_back(r.loss0() - r.loss1());
    y2.push_back(r.loss1() - r.loss2());
  }
  const auto o1 = MaxMinIsotonic(y1, w), o2 = MaxMinIsotonic(y2, w);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    EXPECT_NEAR(g.g1(sorted[i].calibrated_score), o1[i], 1e-9);
    EXPECT_NEAR(g.g2(sorted[i].calibrated_score), o2[i], 1e-9);
    EXPECT_NEAR(g.g12(sorted[i].calibrated_score), o1[i] + o2[i], 1e-9);
  }
}

TEST(FitGainTable, PerNodeOnlyAboveMinimum) {
  std::vector<ReplayRecord> replay;
  for (int i = 0; i < 60; ++i) replay.push_back(Record(0, i / 60.0, {0.3, 0.2, 0.1}));
  for (int i = 0; i < 10; ++i) replay.push_back(Record(1, i / 10.0, {0.3, 0.3, 0.3}));
  const GainTable t = FitGainTable(replay, 2, true, 50);
  EXPECT_TRUE(t.node_specific[0]);
  EXPECT_FALSE(t.node_specific[1]);
  EXPECT_EQ(t.For(1), t.pooled);
  EXPECT_NEAR(t.For(0).g1(0.5), 0.1, 1e-15);
  EXPECT_THROW(FitGainCurves({}), DataError);
}

TEST(ExecutedModeCalibrator, BinMeansEqualBatchMeans) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ExecutedModeCalibrator cal(2, 5, 1.0);
  std::map<std::tuple<int, int, int>, std::vector<double>> batch;
  for (int i = 0; i < 100; ++i) {
    const int node = i % 2;
    const Mode mode = ModeFromIndex(i % 3);
    const double s = u(rng), l = u(rng);
    cal.Update(node, mode, s, l);
    batch[{node, ModeIndex(mode), cal.BinOf(s)}].push_back(l);
  }
  for (const auto& [key, losses] : batch) {
    const auto [node, mode, bin] = key;
    double m = 0.0;
    for (double l : losses) m += l;
    m /= losses.size();
    EXPECT_NEAR(cal.mean(node, ModeFromIndex(mode), bin), m, 1e-12);
    EXPECT_EQ(cal.count(node, ModeFromIndex(mode), bin),
              static_cast<std::int64_t>(losses.size()));
  }
}

TEST(ExecutedModeCalibrator, FallbackChain) {
  ExecutedModeCalibrator cal(2, 4, 1.0);
  EXPECT_EQ(cal.Estimate(0, Mode::kEdgeFusion, 0.5), 0.0);
  cal.Update(1, Mode::kEdgeFusion, 0.9, 0.4);
  EXPECT_EQ(cal.Estimate(0, Mode::kEdgeFusion, 0.1), 0.4);
  cal.Update(0, Mode::kEdgeFusion, 0.9, 0.2);
  EXPECT_EQ(cal.Estimate(0, Mode::kEdgeFusion, 0.1), 0.2);
  cal.Update(0, Mode::kEdgeFusion, 0.1, 0.1);
  EXPECT_EQ(cal.Estimate(0, Mode::kEdgeFusion, 0.1), 0.1);
  EXPECT_EQ(cal.BinOf(-1.0), 0);
  EXPECT_EQ(cal.BinOf(5.0), 3);
}

TEST(SurrogateLosses, HandArithmetic) {
  ExecutedModeCalibrator cal(1, 1, 1.0);
  cal.Update(0, Mode::kExpertOnly, 0.5, 0.3);
  const GainCurves g = MakeGainCurves(StepFunction::Constant(0.1), StepFunction::Constant(0.05));
  const auto l = SurrogateLosses(cal, g, 0, 0.5);
  EXPECT_NEAR(l[0], 0.3, 1e-15);
  EXPECT_NEAR(l[1], 0.2, 1e-15);
  EXPECT_NEAR(l[2], 0.15, 1e-15);
  const GainCurves big = MakeGainCurves(StepFunction::Constant(0.5), StepFunction::Constant(0.0));
  EXPECT_EQ(SurrogateLosses(cal, big, 0, 0.5)[1], 0.0);
}

TEST(InitCalibrator, SeedsEveryMode) {
  std::vector<ReplayRecord> replay = {Record(0, 0.2, {0.3, 0.2, 0.1}), Record(0, 0.2, {0.5, 0.4, 0.3})};
  const auto cal = InitCalibrator(replay, 1, 4, 1.0);
  EXPECT_NEAR(cal.Estimate(0, Mode::kExpertOnly, 0.2), 0.4, 1e-15);
  EXPECT_NEAR(cal.Estimate(0, Mode::kCloudAssisted, 0.2), 0.2, 1e-15);
}

}  // namespace
}  // namespace pvroute
