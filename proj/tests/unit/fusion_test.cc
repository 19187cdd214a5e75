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

#include "pvroute/errors.h"
#include "pvroute/fusion.h"
#include "pvroute/loss.h"

namespace pvroute {
namespace {

// argmin <gamma, w> + KL(w || prior) / eta over the simplex by Newton steps
// on the equality-constrained problem.
std::vector<double> SolveKlProblem(const std::vector<double>& prior,
                                   const std::vector<double>& gamma, double eta) {
  const std::size_t n = prior.size();
  std::vector<double> w(n, 1.0 / n);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> g(n), hinv(n);
    for (std::size_t m = 0; m < n; ++m) {
      g[m] = gamma[m] + (std::log(w[m] / prior[m]) + 1.0) / eta;
      hinv[m] = eta * w[m];
    }
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      num += hinv[m] * g[m];
      den += hinv[m];
    }
    const double nu = num / den;
    std::vector<double> dw(n);
    double step = 1.0;
    for (std::size_t m = 0; m < n; ++m) {
      dw[m] = -hinv[m] * (g[m] - nu);
      if (dw[m] < 0.0) step = std::min(step, -0.9 * w[m] / dw[m]);
    }
    for (std::size_t m = 0; m < n; ++m) w[m] += step * dw[m];
  }
  return w;
}

TEST(EntropicWeights, HandSoftmax) {
  const auto w = EntropicWeights({0.5, 0.5}, {0.0, std::log(2.0)}, 1.0);
  EXPECT_NEAR(w[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(w[1], 1.0 / 3.0, 1e-12);
  EXPECT_THROW(EntropicWeights({1.0}, {0.0, 0.0}, 1.0), DimensionError);
}

TEST(EntropicWeights, MatchesNumericalSolver) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 2;
    std::vector<double> prior(n), gamma(n);
    double z = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      prior[m] = 0.1 + u(rng);
      z += prior[m];
      gamma[m] = 5.0 * u(rng);
    }
    for (double& p : prior) p /= z;
    const double eta = 0.1 + 2.0 * u(rng);
    const auto closed = EntropicWeights(prior, gamma, eta);
    const auto numeric = SolveKlProblem(prior, gamma, eta);
    for (std::size_t m = 0; m < n; ++m) EXPECT_NEAR(closed[m], numeric[m], 1e-9);
  }
}

TEST(EntropicWeights, LargeGradientsStayFinite) {
  const auto w = EntropicWeights({0.5, 0.5}, {1e6, 0.0}, 1.0);
  EXPECT_EQ(w[1], 1.0);
  EXPECT_EQ(w[0], 0.0);
}

TEST(FusionConfig, Validation) {
  FusionConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.eta = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = {};
  c.prior1 = {0.7, 0.7};
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(FusionWeights, ModeZeroThrowsAndPriorAtStart) {
  const FusionConfig c;
  const CumulativeGradient g(2);
  EXPECT_THROW(FusionWeights(c, g, 0, Mode::kExpertOnly), ConfigError);
  const SimplexWeights w = FusionWeights(c, g, 1, Mode::kCloudAssisted);
  ASSERT_EQ(w.size(), 3u);
  for (double v : w.weights()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(FuseAndEmit, ModeZeroPassesExpertThrough) {
  const Candidates c = {{Branch::kExpert, {0.3}}, {Branch::kSmall, {0.9}}};
  EXPECT_EQ(FuseAndEmit(Mode::kExpertOnly, c, {}), HorizonVector{0.3});
}

Candidates EdgePair() { return {{Branch::kExpert, {0.7}}, {Branch::kSmall, {0.3}}}; }

TEST(RevealAndUpdate, GammaIncrementIsSubgradient) {
  RevealBuffer buf;
  CumulativeGradient gamma(1);
  ExecutedModeCalibrator cal(1, 4, 1.0);
  const SimplexWeights w(std::vector<Branch>{Branch::kExpert, Branch::kSmall}, {0.75, 0.25});
  buf.Push({0, 3, Mode::kEdgeFusion, EdgePair(), w, 0.6, 5, true});
  const HorizonVector target{0.5};
  const TargetLookup lookup = [&](int, std::int64_t) { return &target; };
  EXPECT_TRUE(RevealAndUpdate(buf, gamma, &cal, 4, lookup).realized.empty());
  const RevealOutcome out = RevealAndUpdate(buf, gamma, &cal, 5, lookup);
  ASSERT_EQ(out.realized.size(), 1u);
  // Fused 0.6 > 0.5, so the MAE subgradient is +candidates.
  EXPECT_NEAR(gamma.Get(0, Mode::kEdgeFusion)[0], 0.7, 1e-15);
  EXPECT_NEAR(gamma.Get(0, Mode::kEdgeFusion)[1], 0.3, 1e-15);
  EXPECT_NEAR(out.realized[0].loss, 0.1, 1e-15);
  EXPECT_EQ(cal.count(0, Mode::kEdgeFusion, cal.BinOf(0.6)), 1);
  EXPECT_TRUE(buf.empty());
}

TEST(RevealAndUpdate, FixedWeightsSkipGamma) {
  RevealBuffer buf;
  CumulativeGradient gamma(1);
  const SimplexWeights w(std::vector<Branch>{Branch::kExpert, Branch::kSmall}, {1.0, 0.0});
  buf.Push({0, 0, Mode::kEdgeFusion, EdgePair(), w, 0.1, 1, false});
  const HorizonVector target{0.5};
  RevealAndUpdate(buf, gamma, nullptr, 1, [&](int, std::int64_t) { return &target; });
  EXPECT_EQ(gamma.Get(0, Mode::kEdgeFusion), (std::vector<double>{0.0, 0.0}));
}

TEST(RevealAndUpdate, MissingTargetsStayBuffered) {
  RevealBuffer buf;
  CumulativeGradient gamma(1);
  buf.Push({0, 0, Mode::kExpertOnly, EdgePair(), {}, 0.1, 1, true});
  const auto out = RevealAndUpdate(buf, gamma, nullptr, 2,
                                   [](int, std::int64_t) -> const HorizonVector* { return nullptr; });
  EXPECT_EQ(out.missing_targets, 1u);
  EXPECT_EQ(buf.size(), 1u);
}

TEST(RevealBuffer, OrderedByRevealSlot) {
  RevealBuffer buf;
  buf.Push({1, 0, Mode::kExpertOnly, {}, {}, 0, 9, true});
  buf.Push({0, 2, Mode::kExpertOnly, {}, {}, 0, 4, true});
  buf.Push({0, 1, Mode::kExpertOnly, {}, {}, 0, 4, true});
  const auto m = buf.PopMatured(4);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].slot, 1);
  EXPECT_EQ(m[1].slot, 2);
  EXPECT_EQ(buf.size(), 1u);
}

TEST(ComputeRegret, ExactBranchGivesZeroComparator) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RegretRound> rounds;
  const SimplexWeights w(std::vector<Branch>{Branch::kExpert, Branch::kSmall}, {0.5, 0.5});
  double learner = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double y = u(rng);
    RegretRound r;
    r.target = HorizonVector{y};
    r.candidates = {{Branch::kExpert, {y}}, {Branch::kSmall, {u(rng)}}};
    r.weights = w;
    learner += EvalLoss(r.target, FuseCandidates(r.candidates, w));
    rounds.push_back(r);
  }
  const RegretReport rep = ComputeRegret(rounds);
  EXPECT_NEAR(rep.comparator_loss, 0.0, 1e-9);
  EXPECT_NEAR(rep.regret, learner, 1e-9);
  EXPECT_NEAR(rep.comparator[0], 1.0, 1e-6);
  EXPECT_THROW(ComputeRegret({}), DataError);
}

}  // namespace
}  // namespace pvroute
