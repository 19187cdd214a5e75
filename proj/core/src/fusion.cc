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

#include "pvroute/fusion.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "pvroute/errors.h"
#include "pvroute/loss.h"

namespace pvroute {
namespace {

void CheckPrior(const std::vector<double>& prior, std::size_t size) {
  if (prior.size() != size) throw ConfigError("fusion prior has wrong size");
  double total = 0.0;
  for (double p : prior) {
    if (!(p > 0.0)) throw ConfigError("fusion prior entries must be > 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("fusion prior must sum to 1");
  }
}

// Exact simplex vector: renormalize and move rounding slack to the largest
// entry.
std::vector<double> Normalize(std::vector<double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  for (int pass = 0; pass < 4; ++pass) {
    double sum = 0.0;
    for (double v : w) sum += v;
    if (std::abs(sum - 1.0) <= 1e-15) break;
    auto it = std::max_element(w.begin(), w.end());
    *it += 1.0 - sum;
  }
  return w;
}

constexpr double kGolden = 0.6180339887498949;

// Minimizes a convex f over [lo, hi]; returns (argmin, min).
template <typename F>
std::pair<double, double> GoldenSection(F&& f, double lo, double hi,
                                        int iterations) {
  if (hi - lo <= 0.0) return {lo, f(lo)};
  double a = lo, b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iterations; ++k) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  // Endpoints matter for vertex optima of piecewise-linear objectives.
  double best_x = fc <= fd ? c : d;
  double best = std::min(fc, fd);
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return {best_x, best};
}

// min over {u >= 0 : sum(u[0..k]) = budget} of f, where coordinates above k
// are already fixed in `u`.
template <typename F>
double NestedMin(F& f, std::vector<double>& u, int k, double budget,
                 int iterations) {
  if (k == 0) {
    u[0] = budget;
    return f(u);
  }
  auto inner = [&](double x) {
    u[k] = x;
    return NestedMin(f, u, k - 1, budget - x, iterations);
  };
  const auto [x, value] = GoldenSection(inner, 0.0, budget, iterations);
  u[k] = x;
  NestedMin(f, u, k - 1, budget - x, iterations);
  return value;
}

}  // namespace

const std::vector<double>& FusionConfig::Prior(Mode mode) const {
  if (mode == Mode::kEdgeFusion) return prior1;
  if (mode == Mode::kCloudAssisted) return prior2;
  throw ConfigError("mode 0 has no fusion prior");
}

void FusionConfig::Validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be > 0");
  CheckPrior(prior1, 2);
  CheckPrior(prior2, 3);
}

std::vector<double> EntropicWeights(const std::vector<double>& prior,
                                    const std::vector<double>& gamma,
                                    double eta) {
  if (prior.size() != gamma.size() || prior.empty()) {
    throw DimensionError("entropic weights: prior and gamma sizes differ");
  }
  std::vector<double> logits(prior.size());
  for (std::size_t m = 0; m < prior.size(); ++m) {
    logits[m] = std::log(prior[m]) - eta * gamma[m];
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(prior.size());
  for (std::size_t m = 0; m < prior.size(); ++m) {
    w[m] = std::exp(logits[m] - top);
  }
  return Normalize(std::move(w));
}

CumulativeGradient::CumulativeGradient(int nodes)
    : gamma1_(static_cast<std::size_t>(nodes), std::vector<double>(2, 0.0)),
      gamma2_(static_cast<std::size_t>(nodes), std::vector<double>(3, 0.0)) {}

const std::vector<double>& CumulativeGradient::Get(int node, Mode mode) const {
  if (node < 0 || node >= nodes()) throw DimensionError("gamma: node index");
  if (mode == Mode::kEdgeFusion) return gamma1_[node];
  if (mode == Mode::kCloudAssisted) return gamma2_[node];
  throw ConfigError("mode 0 has no cumulative gradient");
}

std::vector<double>& CumulativeGradient::Mutable(int node, Mode mode) {
  if (node < 0 || node >= nodes()) throw DimensionError("gamma: node index");
  if (mode == Mode::kEdgeFusion) return gamma1_[node];
  if (mode == Mode::kCloudAssisted) return gamma2_[node];
  throw ConfigError("mode 0 has no cumulative gradient");
}

void CumulativeGradient::Add(int node, Mode mode,
                             const std::vector<double>& gradient) {
  auto& g = Mutable(node, mode);
  if (g.size() != gradient.size()) throw DimensionError("gamma: size");
  for (std::size_t m = 0; m < g.size(); ++m) g[m] += gradient[m];
}

SimplexWeights FusionWeights(const FusionConfig& config,
                             const CumulativeGradient& gamma, int node,
                             Mode mode) {
  const auto branches = ActiveBranches(mode);
  return SimplexWeights(
      {branches.begin(), branches.end()},
      EntropicWeights(config.Prior(mode), gamma.Get(node, mode), config.eta));
}

HorizonVector FuseAndEmit(Mode mode, const Candidates& candidates,
                          const SimplexWeights& weights) {
  if (mode == Mode::kExpertOnly) return candidates.at(Branch::kExpert);
  return FuseCandidates(candidates, weights);
}

void RevealBuffer::Push(PendingRecord record) {
  auto key = [](const PendingRecord& r) {
    return std::make_tuple(r.reveal_slot, r.slot, r.node);
  };
  auto it = std::upper_bound(
      records_.begin(), records_.end(), record,
      [&](const PendingRecord& a, const PendingRecord& b) {
        return key(a) < key(b);
      });
  records_.insert(it, std::move(record));
}

std::vector<PendingRecord> RevealBuffer::PopMatured(std::int64_t slot) {
  std::vector<PendingRecord> out;
  while (!records_.empty() && records_.front().reveal_slot <= slot) {
    out.push_back(std::move(records_.front()));
    records_.pop_front();
  }
  return out;
}

void RevealBuffer::Restore(std::vector<PendingRecord> records) {
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    records_.push_front(std::move(*it));
  }
}

RevealOutcome RevealAndUpdate(RevealBuffer& buffer, CumulativeGradient& gamma,
                              ExecutedModeCalibrator* calibrator,
                              std::int64_t current_slot,
                              const TargetLookup& targets,
                              const LossSpec& spec) {
  RevealOutcome outcome;
  std::vector<PendingRecord> matured = buffer.PopMatured(current_slot);
  std::sort(matured.begin(), matured.end(),
            [](const PendingRecord& a, const PendingRecord& b) {
              return std::tie(a.slot, a.node) < std::tie(b.slot, b.node);
            });
  std::vector<PendingRecord> retained;
  for (PendingRecord& r : matured) {
    const HorizonVector* target = targets(r.node, r.slot);
    if (target == nullptr) {
      ++outcome.missing_targets;
      retained.push_back(std::move(r));
      continue;
    }
    RealizedLoss rl;
    rl.node = r.node;
    rl.slot = r.slot;
    rl.mode = r.mode;
    rl.score = r.score;
    rl.prediction = FuseAndEmit(r.mode, r.candidates, r.weights);
    rl.target = *target;
    rl.loss = EvalLoss(*target, rl.prediction, spec);
    if (r.mode != Mode::kExpertOnly && r.update_gamma) {
      gamma.Add(r.node, r.mode,
                LossSubgradientWeights(*target, r.candidates, r.weights, spec));
    }
    if (calibrator != nullptr) {
      calibrator->Update(r.node, r.mode, r.score, rl.loss);
    }
    outcome.realized.push_back(std::move(rl));
  }
  // Missing-target records are retried on later slots.
  for (PendingRecord& r : retained) buffer.Push(std::move(r));
  return outcome;
}

RegretReport ComputeRegret(const std::vector<RegretRound>& rounds,
                           const LossSpec& spec) {
  if (rounds.empty()) throw DataError("regret: no rounds");
  RegretReport report;
  report.rounds = rounds.size();
  const std::size_t n = rounds.front().candidates.size();
  for (const RegretRound& r : rounds) {
    if (r.candidates.size() != n) {
      throw DimensionError("regret: rounds differ in branch count");
    }
    report.learner_loss += EvalLoss(r.target, FuseCandidates(r.candidates, r.weights), spec);
  }
  auto total = [&](const std::vector<double>& u) {
    double sum = 0.0;
    for (const RegretRound& r : rounds) {
      sum += FusionObjective(r.target, r.candidates, u, spec);
    }
    return sum;
  };
  std::vector<double> u(n, 0.0);
  report.comparator_loss =
      NestedMin(total, u, static_cast<int>(n) - 1, 1.0, 80);
  report.comparator = u;
  report.regret = report.learner_loss - report.comparator_loss;
  return report;
}

}  // namespace pvroute
