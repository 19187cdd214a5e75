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

#include "pvroute/router.h"

#include <algorithm>
#include <cmath>

#include "pvroute/errors.h"

namespace pvroute {

void ControllerConfig::Validate() const {
  if (!(V > 0.0) || !std::isfinite(V)) throw ConfigError("V must be > 0");
  if (n_fp < 1) throw ConfigError("N_fp must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw ConfigError("fixed-point damping must lie in (0, 1]");
  }
}

double CongestionCurve::operator()(double rho) const {
  const double r = std::clamp(rho, 0.0, 1.0);
  if (kind == Kind::kSharpened) return d0 + d1 * r / (1.05 - r);
  return d0 + d1 * r;
}

void CongestionCurve::Validate() const {
  if (!(d0 >= 0.0) || !(d1 >= 0.0) || !std::isfinite(d0) ||
      !std::isfinite(d1)) {
    throw ConfigError("congestion curve parameters must be finite and >= 0");
  }
}

std::string_view CongestionKindName(CongestionCurve::Kind kind) {
  return kind == CongestionCurve::Kind::kSharpened ? "sharpened" : "affine";
}

CongestionCurve::Kind CongestionKindFromName(std::string_view name) {
  if (name == "affine") return CongestionCurve::Kind::kAffine;
  if (name == "sharpened") return CongestionCurve::Kind::kSharpened;
  throw ConfigError("unknown congestion curve '" + std::string(name) + "'");
}

const NodeLatency& LatencyParams::For(int node) const {
  if (node >= 0 && static_cast<std::size_t>(node) < nodes.size()) {
    return nodes[node];
  }
  return fallback;
}

void LatencyParams::Validate() const {
  auto check = [](const NodeLatency& n) {
    for (double v : {n.tau_e, n.tau_s, n.tau_f, n.tau_up, n.tau_down}) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError("latencies must be finite and >= 0");
      }
    }
  };
  check(fallback);
  for (const auto& n : nodes) check(n);
  if (!(tau_cloud >= 0.0) || !std::isfinite(tau_cloud)) {
    throw ConfigError("tau_cloud must be finite and >= 0");
  }
  phi.Validate();
}

double ModeLatency(const NodeLatency& node, double tau_cloud,
                   const CongestionCurve& phi, Mode mode, double rho) {
  switch (mode) {
    case Mode::kExpertOnly:
      return node.tau_e;
    case Mode::kEdgeFusion:
      return node.tau_e + node.tau_s + node.tau_f;
    case Mode::kCloudAssisted:
      return node.tau_e + node.tau_f +
             std::max(node.tau_s,
                      node.tau_up + phi(rho) + tau_cloud + node.tau_down);
  }
  return 0.0;
}

double PricingTerms::Kappa2(double rho) const {
  const double tau1 = ModeLatency(latency, tau_cloud, phi, Mode::kEdgeFusion, rho);
  const double tau2 =
      ModeLatency(latency, tau_cloud, phi, Mode::kCloudAssisted, rho);
  return q_tau * (tau2 - tau1) + fixed2;
}

PricingTerms Pricing(const QueueState& queues, const NodeLatency& latency,
                     double tau_cloud, const CongestionCurve& phi,
                     double kappa) {
  PricingTerms p;
  p.kappa1 = queues.q_tau *
             (ModeLatency(latency, tau_cloud, phi, Mode::kEdgeFusion, 0.0) -
              ModeLatency(latency, tau_cloud, phi, Mode::kExpertOnly, 0.0));
  p.q_tau = queues.q_tau;
  p.fixed2 = queues.q_c * kappa + queues.q_rho;
  p.latency = latency;
  p.tau_cloud = tau_cloud;
  p.phi = phi;
  return p;
}

Mode RoutingIndices::Argmin() const {
  Mode best = Mode::kExpertOnly;
  double value = j0;
  if (j1 < value) {
    best = Mode::kEdgeFusion;
    value = j1;
  }
  if (j2 < value) best = Mode::kCloudAssisted;
  return best;
}

RoutingIndices ComputeIndices(const PricingTerms& pricing,
                              const GainCurves& gains, double score, double V,
                              double rho) {
  const double g1 = gains.g1(score);
  const double g2 = gains.g2(score);
  RoutingIndices j;
  j.j0 = 0.0;
  j.j1 = pricing.kappa1 / V - g1;
  j.j2 = (pricing.kappa1 + pricing.Kappa2(rho)) / V - g1 - g2;
  return j;
}

ThresholdSet Thresholds(const PricingTerms& pricing, const GainCurves& gains,
                        double V, double rho) {
  const double k2 = pricing.Kappa2(rho);
  ThresholdSet t;
  t.theta01 = gains.g1.FirstAtLeast(pricing.kappa1 / V);
  t.theta02 = gains.g12.FirstAtLeast((pricing.kappa1 + k2) / V);
  t.theta12 = gains.g2.FirstAtLeast(k2 / V);
  t.theta_c = std::max(t.theta02, t.theta12);
  return t;
}

ThresholdSet StrictThresholds(const PricingTerms& pricing,
                              const GainCurves& gains, double V, double rho) {
  // Both gains are constant between consecutive breakpoints of g1 + g2.
  std::vector<double> starts = {0.0};
  for (double b : gains.g12.breaks()) {
    if (b > 0.0) starts.push_back(b);
  }
  ThresholdSet t;
  t.theta01 = t.theta02 = t.theta12 = kInfiniteThreshold;
  for (double s : starts) {
    const RoutingIndices j = ComputeIndices(pricing, gains, s, V, rho);
    if (t.theta01 == kInfiniteThreshold && j.j1 < j.j0) t.theta01 = s;
    if (t.theta02 == kInfiniteThreshold && j.j2 < j.j0) t.theta02 = s;
    if (t.theta12 == kInfiniteThreshold && j.j2 < j.j1) t.theta12 = s;
  }
  t.theta_c = std::max(t.theta02, t.theta12);
  return t;
}

Mode PartitionMode(const ThresholdSet& strict, double score) {
  if (score >= strict.theta_c) return Mode::kCloudAssisted;
  if (score >= strict.theta01) return Mode::kEdgeFusion;
  return Mode::kExpertOnly;
}

FixedPointResult IterateFixedPoint(const std::function<double(double)>& map,
                                   double rho_init, int iterations,
                                   double damping) {
  FixedPointResult out;
  double rho = std::clamp(rho_init, 0.0, 1.0);
  out.iterates.push_back(rho);
  for (int k = 0; k < iterations; ++k) {
    rho = std::clamp((1.0 - damping) * rho + damping * map(rho), 0.0, 1.0);
    out.iterates.push_back(rho);
  }
  out.rho = rho;
  out.residual = std::abs(map(rho) - rho);
  return out;
}

double MeanFieldMap(const std::vector<NodeRoutingInput>& nodes, double V,
                    double rho) {
  if (nodes.empty()) return 0.0;
  double total = 0.0;
  for (const NodeRoutingInput& n : nodes) {
    const ThresholdSet t = Thresholds(n.pricing, *n.gains, V, rho);
    // F evaluates to 1 at the infinite sentinel, so such nodes add nothing.
    total += t.theta_c == kInfiniteThreshold ? 0.0 : 1.0 - n.cdf->Eval(t.theta_c);
  }
  return total / static_cast<double>(nodes.size());
}

RoutingDecision SelectActions(const std::vector<NodeRoutingInput>& nodes,
                              double rho_star, double V) {
  RoutingDecision d;
  d.rho_star = rho_star;
  d.nodes.reserve(nodes.size());
  for (const NodeRoutingInput& n : nodes) {
    NodeDecision nd;
    nd.score = n.score;
    nd.indices = ComputeIndices(n.pricing, *n.gains, n.score, V, rho_star);
    nd.thresholds = Thresholds(n.pricing, *n.gains, V, rho_star);
    nd.mode = PartitionMode(StrictThresholds(n.pricing, *n.gains, V, rho_star),
                            n.score);
    d.nodes.push_back(nd);
  }
  return d;
}

RoutingDecision Route(const std::vector<NodeRoutingInput>& nodes,
                      const ControllerConfig& config, double rho_init) {
  const FixedPointResult fp = IterateFixedPoint(
      [&](double rho) { return MeanFieldMap(nodes, config.V, rho); }, rho_init,
      config.n_fp, config.damping);
  RoutingDecision d = SelectActions(nodes, fp.rho, config.V);
  d.fp_residual = fp.residual;
  return d;
}

}  // namespace pvroute
