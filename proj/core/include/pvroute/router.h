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

#ifndef PVROUTE_ROUTER_H_
#define PVROUTE_ROUTER_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pvroute/calibration.h"
#include "pvroute/queues.h"
#include "pvroute/screening.h"
#include "pvroute/types.h"

namespace pvroute {

struct ControllerConfig {
  double V = 80.0;
  int n_fp = 5;
  double damping = 1.0;  // lambda_fp

  void Validate() const;
};

// Cloud congestion delay phi(rho): affine d0 + d1*rho, or the sharpened
// d0 + d1*rho/(1.05 - rho).
struct CongestionCurve {
  enum class Kind { kAffine, kSharpened };
  Kind kind = Kind::kAffine;
  double d0 = 10.0;
  double d1 = 60.0;

  double operator()(double rho) const;
  void Validate() const;
};

std::string_view CongestionKindName(CongestionCurve::Kind kind);
CongestionCurve::Kind CongestionKindFromName(std::string_view name);

// Per-node latency components in milliseconds.
struct NodeLatency {
  double tau_e = 10.0;
  double tau_s = 25.0;
  double tau_f = 5.0;
  double tau_up = 20.0;
  double tau_down = 20.0;
};

struct LatencyParams {
  std::vector<NodeLatency> nodes;  // empty or one entry per node
  NodeLatency fallback;            // used for nodes without an entry
  double tau_cloud = 40.0;
  CongestionCurve phi;

  const NodeLatency& For(int node) const;
  void Validate() const;
};

double ModeLatency(const NodeLatency& node, double tau_cloud,
                   const CongestionCurve& phi, Mode mode, double rho);
inline double ModeLatency(const LatencyParams& params, int node, Mode mode,
                          double rho) {
  return ModeLatency(params.For(node), params.tau_cloud, params.phi, mode, rho);
}

// 0 for modes 0 and 1, kappa for mode 2.
inline double CommCost(Mode mode, double kappa) {
  return mode == Mode::kCloudAssisted ? kappa : 0.0;
}

struct PricingTerms {
  double kappa1 = 0.0;
  // kappa2(rho) = q_tau * (tau2(rho) - tau1) + q_c * kappa + q_rho.
  double q_tau = 0.0;
  double fixed2 = 0.0;  // q_c * kappa + q_rho
  NodeLatency latency;
  double tau_cloud = 0.0;
  CongestionCurve phi;

  double Kappa2(double rho) const;
};

PricingTerms Pricing(const QueueState& queues, const NodeLatency& latency,
                     double tau_cloud, const CongestionCurve& phi,
                     double kappa);

struct RoutingIndices {
  double j0 = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  // argmin with ties going to the lower mode.
  Mode Argmin() const;
};

RoutingIndices ComputeIndices(const PricingTerms& pricing,
                              const GainCurves& gains, double score, double V,
                              double rho);

struct ThresholdSet {
  double theta01 = 0.0;
  double theta02 = 0.0;
  double theta12 = 0.0;
  double theta_c = 0.0;
};

// theta01 = inf{s : g1 >= kappa1/V}, theta02 = inf{s : g1 + g2 >=
// (kappa1 + kappa2)/V}, theta12 = inf{s : g2 >= kappa2/V}, and theta_c =
// max(theta02, theta12). kInfiniteThreshold when the level is never reached.
ThresholdSet Thresholds(const PricingTerms& pricing, const GainCurves& gains,
                        double V, double rho);

// Scores at which each index comparison first turns strict: J1 < J0, J2 < J0
// and J2 < J1 respectively (theta_c = max of the last two). Found by
// evaluating the indices on every step of the gains.
ThresholdSet StrictThresholds(const PricingTerms& pricing,
                              const GainCurves& gains, double V, double rho);

// Threshold partition of the score axis given StrictThresholds: mode 2 from
// theta_c on, otherwise mode 1 from theta01 on, otherwise mode 0.
Mode PartitionMode(const ThresholdSet& strict, double score);

struct FixedPointResult {
  double rho = 0.0;
  double residual = 0.0;
  std::vector<double> iterates;  // rho after each step, first entry rho_init
};

// rho <- (1 - damping) rho + damping T(rho) for `iterations` steps; the
// result is clamped to [0, 1] and residual = |T(rho) - rho|.
FixedPointResult IterateFixedPoint(const std::function<double(double)>& map,
                                   double rho_init, int iterations,
                                   double damping);

struct NodeRoutingInput {
  double score = 0.0;  // calibrated
  const GainCurves* gains = nullptr;
  const ScoreCdf* cdf = nullptr;
  PricingTerms pricing;
};

// (1/N) sum_i (1 - F_i(theta_c,i(rho))).
double MeanFieldMap(const std::vector<NodeRoutingInput>& nodes, double V,
                    double rho);

struct NodeDecision {
  Mode mode = Mode::kExpertOnly;
  RoutingIndices indices;
  double score = 0.0;
  ThresholdSet thresholds;  // at rho_star
};

struct RoutingDecision {
  std::vector<NodeDecision> nodes;
  double rho_star = 0.0;
  double fp_residual = 0.0;
};

// Per-node threshold partition at rho_star.
RoutingDecision SelectActions(const std::vector<NodeRoutingInput>& nodes,
                              double rho_star, double V);

// Fixed point for rho from rho_init, then SelectActions.
RoutingDecision Route(const std::vector<NodeRoutingInput>& nodes,
                      const ControllerConfig& config, double rho_init);

}  // namespace pvroute

#endif  // PVROUTE_ROUTER_H_
