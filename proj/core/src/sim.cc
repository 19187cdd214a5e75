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

#include "pvroute/sim.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

#include "pvroute/errors.h"
#include "pvroute/fusion.h"
#include "pvroute/loss.h"
#include "pvroute/parallel.h"
#include "pvroute/router.h"
#include "pvroute/screening.h"

namespace pvroute {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void CheckConsistent(const Dataset& data, const BranchModels& models,
                     const Bundle& bundle, const RunConfig& config) {
  if (bundle.horizon != config.model.horizon ||
      models.horizon != config.model.horizon) {
    throw ConfigError("horizon of the bundle or models differs from model.horizon");
  }
  if (bundle.node_ids != data.node_ids ||
      models.experts.size() != data.node_ids.size()) {
    throw ConfigError("bundle nodes differ from the dataset nodes");
  }
  if (bundle.calibrator.nodes() != static_cast<int>(data.node_ids.size()) ||
      bundle.cdf_seeds.size() != data.node_ids.size()) {
    throw ConfigError("bundle calibrator or CDF seeds do not cover every node");
  }
}

// Per-node work of one slot before the routing decision.
struct Screened {
  HorizonVector expert;
  HorizonVector small;
  ScreeningFeatures features;
  double score = 0.0;
  double calibrated = 0.0;
};

std::int64_t RowKey(std::int64_t slot, int node, int nodes) {
  return slot * nodes + node;
}

}  // namespace

Policy ParsePolicy(std::string_view name) {
  const std::string s = Lower(name);
  Policy p;
  if (s == "cape") {
    p.kind = PolicyKind::kCape;
  } else if (s == "exo") {
    p.kind = PolicyKind::kExo;
  } else if (s == "edo") {
    p.kind = PolicyKind::kEdo;
  } else if (s == "co") {
    p.kind = PolicyKind::kCo;
  } else if (s == "aca") {
    p.kind = PolicyKind::kAca;
  } else if (s == "str") {
    p.kind = PolicyKind::kStr;
  } else if (s.rfind("str:", 0) == 0) {
    p.kind = PolicyKind::kStr;
    try {
      std::size_t used = 0;
      p.threshold = std::stod(s.substr(4), &used);
      if (used != s.size() - 4) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("policy: bad STR threshold in '" + std::string(name) + "'");
    }
    if (!(*p.threshold >= 0.0)) throw ConfigError("policy: STR threshold must be >= 0");
  } else {
    throw ConfigError("unknown policy '" + std::string(name) + "'");
  }
  return p;
}

std::string PolicyName(const Policy& policy) {
  switch (policy.kind) {
    case PolicyKind::kCape: return "CAPE";
    case PolicyKind::kExo: return "ExO";
    case PolicyKind::kEdo: return "EdO";
    case PolicyKind::kCo: return "CO";
    case PolicyKind::kAca: return "ACA";
    case PolicyKind::kStr: break;
  }
  if (!policy.threshold) return "STR";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "STR:%g", *policy.threshold);
  return buf;
}

bool UsesCloud(PolicyKind kind) {
  return kind != PolicyKind::kExo && kind != PolicyKind::kEdo;
}

SlotTrace RunSimulation(const Dataset& data, const BranchModels& models,
                        const Bundle& bundle, const Evaluation& evaluation,
                        const RunConfig& config, const Policy& policy) {
  CheckConsistent(data, models, bundle, config);
  const std::vector<Sample>& test = evaluation.test;
  if (evaluation.test_replay.size() != test.size()) {
    throw ConfigError("evaluation replay does not match the test samples");
  }
  const int nodes = static_cast<int>(data.node_ids.size());
  const Budgets budgets = config.BudgetsFor(data.node_ids);
  const LatencyParams latency = config.LatencyFor(data.node_ids);
  const std::vector<double> kappa = config.KappaFor(data.node_ids);
  const ControllerConfig& controller = config.controller.controller;
  const double V = controller.V;
  const double str_threshold = policy.threshold.value_or(bundle.str_threshold);
  const bool insert = config.sim.insert_revealed && UsesCloud(policy.kind);

  FusionConfig fusion;
  fusion.eta = config.fusion.eta;
  fusion.prior1 = bundle.prior1;
  fusion.prior2 = bundle.prior2;
  fusion.Validate();

  SlotTrace trace;
  trace.nodes = nodes;
  trace.horizon = config.model.horizon;
  trace.budgets = budgets;

  CaseBase base = evaluation.base;
  std::vector<ScoreCdf> cdfs;
  cdfs.reserve(static_cast<std::size_t>(nodes));
  for (int n = 0; n < nodes; ++n) {
    cdfs.emplace_back(config.screening.gamma,
                      static_cast<std::size_t>(config.screening.w_cdf));
    for (double s : bundle.cdf_seeds[n]) cdfs.back().Update(s);
  }
  CumulativeGradient gamma(nodes);
  ExecutedModeCalibrator calibrator = bundle.calibrator;
  RevealBuffer buffer;
  QueueState queues;
  double rho_prev = 0.0;

  std::unordered_map<std::int64_t, std::size_t> sample_of;
  for (std::size_t i = 0; i < test.size(); ++i) {
    sample_of.emplace(RowKey(test[i].window.slot, test[i].window.node, nodes), i);
  }
  std::unordered_map<std::int64_t, std::size_t> row_of;
  const TargetLookup targets = [&](int node, std::int64_t slot) -> const HorizonVector* {
    const auto it = sample_of.find(RowKey(slot, node, nodes));
    return it == sample_of.end() ? nullptr : &test[it->second].target;
  };

  for (std::size_t begin = 0; begin < test.size();) {
    const std::int64_t t = test[begin].window.slot;
    std::size_t end = begin;
    while (end < test.size() && test[end].window.slot == t) ++end;
    const std::size_t n = end - begin;

    // (1) Screening.
    std::vector<Screened> screened(n);
    ParallelFor(n, config.threads, [&](std::size_t k) {
      const Sample& s = test[begin + k];
      Screened& x = screened[k];
      x.expert = models.experts[s.window.node].Predict(s.window);
      const auto replicas = models.small.PredictReplicas(s.window);
      std::vector<double> mean(static_cast<std::size_t>(models.horizon), 0.0);
      for (const HorizonVector& r : replicas) {
        for (std::size_t h = 0; h < mean.size(); ++h) mean[h] += r[h];
      }
      for (double& v : mean) v /= static_cast<double>(replicas.size());
      x.small = HorizonVector(std::move(mean));
      x.features = ComputeFeatures(s.window, x.expert, replicas, x.small,
                                   models.encoder, bundle.ood, bundle.mutation);
      x.score = RoutingScore(x.features, bundle.screening);
      x.calibrated = bundle.screening.alpha * x.score;
    });

    // (2) Modes.
    std::vector<NodeRoutingInput> inputs(n);
    for (std::size_t k = 0; k < n; ++k) {
      const int node = test[begin + k].window.node;
      inputs[k].score = screened[k].calibrated;
      inputs[k].gains = &bundle.gains.For(node);
      inputs[k].cdf = &cdfs[node];
      inputs[k].pricing = Pricing(queues, latency.For(node), latency.tau_cloud,
                                  latency.phi, kappa[node]);
    }
    RoutingDecision decision;
    if (policy.kind == PolicyKind::kCape) {
      decision = Route(inputs, controller, rho_prev);
      rho_prev = decision.rho_star;
    } else {
      decision.nodes.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        Mode mode = Mode::kExpertOnly;
        switch (policy.kind) {
          case PolicyKind::kEdo: mode = Mode::kEdgeFusion; break;
          case PolicyKind::kCo:
          case PolicyKind::kAca: mode = Mode::kCloudAssisted; break;
          case PolicyKind::kStr:
            mode = screened[k].calibrated >= str_threshold ? Mode::kCloudAssisted
                                                           : Mode::kExpertOnly;
            break;
          default: break;
        }
        decision.nodes[k].mode = mode;
        decision.nodes[k].score = screened[k].calibrated;
      }
    }
    std::size_t cloud_nodes = 0;
    for (const NodeDecision& d : decision.nodes) {
      if (d.mode == Mode::kCloudAssisted) ++cloud_nodes;
    }
    const double rho = static_cast<double>(cloud_nodes) / static_cast<double>(n);
    if (policy.kind != PolicyKind::kCape) {
      // Indices for the trace at the realized load.
      decision.rho_star = rho;
      for (std::size_t k = 0; k < n; ++k) {
        NodeDecision& d = decision.nodes[k];
        d.indices = ComputeIndices(inputs[k].pricing, *inputs[k].gains,
                                   inputs[k].score, V, rho);
        d.thresholds = Thresholds(inputs[k].pricing, *inputs[k].gains, V, rho);
      }
    }

    // (3) Cloud branch on demand.
    std::vector<CloudOutput> cloud(n);
    ParallelFor(n, config.threads, [&](std::size_t k) {
      if (decision.nodes[k].mode != Mode::kCloudAssisted) return;
      cloud[k] = models.PredictCloud(base, test[begin + k].window,
                                     config.model.k, config.model.temperature,
                                     screened[k].small);
    });

    // (4)-(5) Fusion, emission and accounting.
    Arrivals arrivals;
    for (std::size_t k = 0; k < n; ++k) {
      const Sample& s = test[begin + k];
      const int node = s.window.node;
      const NodeDecision& d = decision.nodes[k];
      PendingRecord pending;
      pending.node = node;
      pending.slot = t;
      pending.mode = d.mode;
      pending.score = screened[k].calibrated;
      pending.reveal_slot = s.reveal_slot;
      pending.candidates[Branch::kExpert] = screened[k].expert;
      NodeSlotRecord row;
      if (d.mode != Mode::kExpertOnly) {
        pending.candidates[Branch::kSmall] = screened[k].small;
      }
      if (d.mode == Mode::kCloudAssisted) {
        ++trace.retrieval_calls;
        pending.candidates[Branch::kCloud] = cloud[k].prediction;
        row.cloud_fallback = cloud[k].fallback;
        if (cloud[k].fallback) ++trace.cloud_fallbacks;
      }
      if (policy.kind == PolicyKind::kCo) {
        pending.weights = SimplexWeights::OneHot(ActiveBranches(d.mode), Branch::kCloud);
        pending.update_gamma = false;
      } else if (d.mode != Mode::kExpertOnly) {
        pending.weights = FusionWeights(fusion, gamma, node, d.mode);
      }
      row.slot = t;
      row.node = node;
      row.mode = d.mode;
      row.score = screened[k].score;
      row.calibrated = screened[k].calibrated;
      row.j0 = d.indices.j0;
      row.j1 = d.indices.j1;
      row.j2 = d.indices.j2;
      row.theta_c = d.thresholds.theta_c;
      row.latency = ModeLatency(latency, node, d.mode, rho);
      row.comm = CommCost(d.mode, kappa[node]);
      row.weights.assign(pending.weights.weights().begin(),
                         pending.weights.weights().end());
      row.oracle_label = evaluation.test_replay[begin + k].oracle_label;
      row.ramp = RampMagnitude(s) >= bundle.ramp_threshold;
      row.ood = screened[k].features.o >= bundle.ood_threshold;
      arrivals.latency += row.latency;
      arrivals.comm += row.comm;
      row_of.emplace(RowKey(t, node, nodes), trace.rows.size());
      trace.rows.push_back(std::move(row));
      buffer.Push(std::move(pending));
    }
    arrivals.latency /= static_cast<double>(n);
    arrivals.comm /= static_cast<double>(n);
    arrivals.rho = rho;

    // (6) Queue update.
    queues = UpdateQueues(queues, arrivals, budgets);
    SlotRecord slot;
    slot.slot = t;
    slot.rho = rho;
    slot.rho_star = decision.rho_star;
    slot.fp_residual = decision.fp_residual;
    slot.arrivals = arrivals;
    slot.queues = queues;
    trace.slots.push_back(slot);

    // (7) Score CDFs, then reveal whatever matured by the end of the slot.
    for (std::size_t k = 0; k < n; ++k) {
      cdfs[test[begin + k].window.node].Update(screened[k].calibrated);
    }
    const RevealOutcome outcome =
        RevealAndUpdate(buffer, gamma, &calibrator, t, targets, config.loss);
    trace.missing_targets += outcome.missing_targets;
    for (const RealizedLoss& r : outcome.realized) {
      NodeSlotRecord& row = trace.rows[row_of.at(RowKey(r.slot, r.node, nodes))];
      row.revealed = true;
      row.loss = r.loss;
      double abs_sum = 0.0, sq_sum = 0.0;
      for (std::size_t h = 0; h < r.target.size(); ++h) {
        const double e = r.prediction[h] - r.target[h];
        abs_sum += std::abs(e);
        sq_sum += e * e;
      }
      row.abs_err = abs_sum / static_cast<double>(r.target.size());
      row.sq_err = sq_sum / static_cast<double>(r.target.size());
      if (insert) {
        const Sample& s = test[sample_of.at(RowKey(r.slot, r.node, nodes))];
        base.Insert(Case{models.encoder.Encode(s.window), s.target,
                         s.reveal_slot, s.window.node});
      }
    }
    begin = end;
  }

  // One-slot average loss over the rows revealed inside the run.
  std::size_t r = 0;
  for (SlotRecord& slot : trace.slots) {
    double sum = 0.0;
    while (r < trace.rows.size() && trace.rows[r].slot == slot.slot) {
      if (trace.rows[r].revealed) {
        sum += trace.rows[r].loss;
        ++slot.revealed;
      }
      ++r;
    }
    slot.avg_loss = slot.revealed > 0 ? sum / slot.revealed : 0.0;
  }
  return trace;
}

Json MetricsToJson(const MetricReport& report) {
  Json j = Json::object();
  for (const auto& [name, value] : MetricColumns(report)) {
    j[name] = std::isfinite(value) ? Json(value) : Json(nullptr);
  }
  j["cloud_fallbacks"] = report.cloud_fallbacks;
  j["avg_rho_gap"] = report.avg_rho_gap;
  j["bound_holds"] = {report.bound_holds[0], report.bound_holds[1],
                      report.bound_holds[2]};
  j["unstable"] = report.stability.unstable;
  return j;
}

Json RunSummary(const RunConfig& config, const Policy& policy,
                const SlotTrace& trace, const MetricReport& report) {
  return Json{
      {"policy", PolicyName(policy)},
      {"slots", trace.slots.size()},
      {"rows", trace.rows.size()},
      {"retrieval_calls", trace.retrieval_calls},
      {"missing_targets", trace.missing_targets},
      {"metrics", MetricsToJson(report)},
      {"config", ConfigToJson(config)},
  };
}

namespace {

double MeanAbsDistance(const HorizonVector& a, const HorizonVector& b) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionError("retrieval gap: prediction lengths differ");
  }
  double sum = 0.0;
  for (std::size_t h = 0; h < a.size(); ++h) sum += std::abs(a[h] - b[h]);
  return sum / static_cast<double>(a.size());
}

}  // namespace

RetrievalGapReport CheckRetrievalGap(const std::vector<RetrievalGapCase>& cases,
                                     double lz, const PropertyCheckConfig& check,
                                     const LossSpec& spec) {
  if (cases.empty()) throw DataError("retrieval gap: no test points");
  RetrievalGapReport r;
  r.points = cases.size();
  for (const RetrievalGapCase& c : cases) {
    r.eps_pred = std::max(r.eps_pred, MeanAbsDistance(c.learned, c.oracle_at_z));
  }
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (const RetrievalGapCase& c : cases) {
    const double gap = std::abs(EvalLoss(c.target, c.learned, spec) -
                                EvalLoss(c.target, c.oracle_at_star, spec));
    const double bound =
        check.loss_lipschitz * (r.eps_pred + lz * c.context_distance);
    r.max_excess = std::max(r.max_excess, gap - bound);
    if (gap > bound + check.tolerance) ++r.violations;
  }
  return r;
}

}  // namespace pvroute
