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

#include "pvroute/experiment.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "pvroute/errors.h"
#include "pvroute/metrics.h"
#include "pvroute/synth.h"

namespace pvroute {
namespace {

void SortSamples(std::vector<Sample>& samples) {
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) {
                     return std::tie(a.window.slot, a.window.node) <
                            std::tie(b.window.slot, b.window.node);
                   });
}

ReplayOptions ReplayOptionsFor(const RunConfig& config) {
  ReplayOptions o;
  o.k = config.model.k;
  o.temperature = config.model.temperature;
  o.loss = config.loss;
  o.threads = config.threads;
  return o;
}

}  // namespace

Dataset BuildDataset(const std::vector<RawSeries>& series,
                     const RunConfig& config) {
  if (series.empty()) throw DataError("dataset has no nodes");
  Dataset data;
  data.grid = InferSlotGrid(series);
  const std::size_t covariates = series.front().covariate_names.size();
  for (const RawSeries& s : series) {
    if (s.covariate_names != series.front().covariate_names) {
      throw SchemaError("all nodes must share the covariate columns");
    }
  }
  data.layout.lags = config.model.lags;
  data.layout.covariates = static_cast<int>(covariates);
  data.layout.harmonics = config.model.harmonics;
  SampleOptions options;
  options.lags = config.model.lags;
  options.horizon = config.model.horizon;
  options.mutation_window = config.screening.w_mu;
  options.harmonics = config.model.harmonics;
  options.skip_night = config.data.skip_night;
  std::vector<Sample> all;
  for (std::size_t i = 0; i < series.size(); ++i) {
    data.node_ids.push_back(series[i].node_id);
    data.capacity.push_back(series[i].capacity);
    data.rows += series[i].size();
    SampleBuild built =
        BuildSamples(series[i], static_cast<int>(i), options, data.grid);
    data.clamped_power += built.clamped_power;
    for (Sample& s : built.samples) all.push_back(std::move(s));
  }
  SortSamples(all);
  data.split = ChronologicalSplit(all, config.data.split);
  if (data.split.train.empty() || data.split.val.empty() ||
      data.split.test.empty()) {
    throw DataError("chronological split left an empty partition");
  }
  return data;
}

Dataset LoadDataset(const RunConfig& config) {
  if (config.data.source == "synthetic") {
    return BuildDataset(Synthesize(config.data.synthetic, config.seed), config);
  }
  const auto capacity = LoadCapacityCsv(config.data.capacity_path);
  LoadResult loaded =
      LoadCsvDataset(config.data.paths, config.data.schema, capacity);
  Dataset data = BuildDataset(loaded.series, config);
  data.dropped_rows = loaded.dropped_rows;
  return data;
}

double RampMagnitude(const Sample& sample) {
  double prev = sample.window.last_power;
  double best = 0.0;
  for (double y : sample.target) {
    best = std::max(best, std::abs(y - prev));
    prev = y;
  }
  return best;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BranchModels TrainModels(const Dataset& data, const RunConfig& config) {
  BranchModels models;
  models.horizon = config.model.horizon;
  models.layout = data.layout;
  models.seed = config.seed;
  const RidgeOptions ridge{config.model.lambda_ridge};
  const auto& train = data.split.train;
  std::vector<std::vector<Sample>> per_node(data.node_ids.size());
  for (const Sample& s : train) per_node[s.window.node].push_back(s);
  const std::size_t n_nodes = per_node.size();
  const std::size_t scarce =
      std::min(n_nodes, static_cast<std::size_t>(config.model.scarce_nodes));
  for (std::size_t i = n_nodes - scarce; i < n_nodes; ++i) {
    auto& rows = per_node[i];
    const auto keep = static_cast<std::size_t>(
        std::ceil(config.model.scarce_fraction * static_cast<double>(rows.size())));
    rows.erase(rows.begin(), rows.end() - static_cast<std::ptrdiff_t>(keep));
  }
  for (std::size_t i = 0; i < data.node_ids.size(); ++i) {
    models.experts.push_back(TrainExpert(per_node[i], data.node_ids[i],
                                         config.model.horizon, ridge));
  }
  models.small = TrainSmall(train, config.model.horizon, config.model.replicas,
                            config.seed, ridge);
  models.encoder = FitQueryEncoder(train, data.layout, config.model.query_lags);
  const CaseBase base = BuildRetrievalBase(data, models, {});
  CloudTrainOptions cloud;
  cloud.k = config.model.k;
  cloud.temperature = config.model.temperature;
  cloud.lambda = config.model.lambda_ridge;
  cloud.stride = config.model.cloud_stride;
  models.cloud = TrainCloudRegressor(train, models.encoder, base, cloud);
  models.cloud.horizon = config.model.horizon;
  return models;
}

CaseBase BuildRetrievalBase(
    const Dataset& data, const BranchModels& models,
    const std::vector<const std::vector<Sample>*>& extra) {
  const QueryFn query = [&](const ObservationWindow& w) {
    return models.encoder.Encode(w);
  };
  CaseBase base = BuildCaseBase(data.split.train, query);
  std::vector<Case> more;
  for (const auto* samples : extra) {
    for (const Sample& s : *samples) {
      more.push_back(Case{query(s.window), s.target, s.reveal_slot, s.window.node});
    }
  }
  base.InsertBatch(std::move(more));
  return base;
}

double TuneStrThreshold(const std::vector<ReplayRecord>& replay,
                        const Budgets& budgets, const LatencyParams& latency,
                        const std::vector<double>& kappa) {
  if (replay.empty()) throw DataError("STR tuning needs a replay set");
  std::vector<std::size_t> order(replay.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return replay[a].calibrated_score > replay[b].calibrated_score;
  });
  const double n = static_cast<double>(replay.size());
  auto kappa_of = [&](int node) {
    return node >= 0 && static_cast<std::size_t>(node) < kappa.size() ? kappa[node]
                                                                      : 1.0;
  };
  // Escalating the first m records (by descending score).
  auto feasible = [&](std::size_t m) {
    const double usage = static_cast<double>(m) / n;
    double lat = 0.0, comm = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      const int node = replay[order[r]].node;
      const Mode mode = r < m ? Mode::kCloudAssisted : Mode::kExpertOnly;
      lat += ModeLatency(latency, node, mode, usage);
      comm += CommCost(mode, kappa_of(node));
    }
    return usage <= budgets.rho_max && lat / n <= budgets.tau_max &&
           comm / n <= budgets.c_max;
  };
  // Only prefixes that end on a score change are realizable thresholds.
  std::vector<std::size_t> cuts = {0};
  for (std::size_t m = 1; m <= order.size(); ++m) {
    if (m == order.size() || replay[order[m]].calibrated_score !=
                                 replay[order[m - 1]].calibrated_score) {
      cuts.push_back(m);
    }
  }
  // Feasibility is monotone in m: every arrival grows with escalation.
  std::size_t lo = 0, hi = cuts.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (feasible(cuts[mid])) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const std::size_t m = cuts[lo];
  if (m == 0) {
    return std::nextafter(replay[order.front()].calibrated_score,
                          kInfiniteThreshold);
  }
  return replay[order[m - 1]].calibrated_score;
}

Prepared PrepareWith(const RunConfig& config, Dataset data,
                     BranchModels models) {
  Prepared p;
  p.data = std::move(data);
  p.models = std::move(models);
  const auto& train = p.data.split.train;
  const auto& val = p.data.split.val;
  const int nodes = static_cast<int>(p.data.node_ids.size());
  Bundle& b = p.bundle;
  b.horizon = config.model.horizon;
  b.lags = config.model.lags;
  b.node_ids = p.data.node_ids;

  std::vector<std::vector<double>> keys;
  keys.reserve(train.size());
  for (const Sample& s : train) keys.push_back(p.models.encoder.Encode(s.window));
  b.ood = FitOodReference(keys);
  b.mutation = FitMutationScale(train);

  const CaseBase base = BuildRetrievalBase(p.data, p.models, {&val});
  p.val_replay = BuildReplaySet(val, p.models, base, b.ood, b.mutation,
                                ReplayOptionsFor(config));

  std::vector<ScreeningFeatures> features;
  std::vector<int> labels;
  for (const ReplayRecord& r : p.val_replay) {
    features.push_back(r.features);
    labels.push_back(r.oracle_label);
  }
  LogisticOptions logistic;
  logistic.l2 = config.screening.l2;
  logistic.iterations = config.screening.iterations;
  logistic.log_features = config.screening.log_features;
  logistic.alpha = config.screening.alpha;
  b.screening = FitScreeningWeights(features, labels, logistic);
  b.screening_degenerate = b.screening.degenerate;
  AssignScores(p.val_replay, b.screening);
  std::vector<double> scores;
  for (const ReplayRecord& r : p.val_replay) scores.push_back(r.calibrated_score);
  b.replay_auroc = Auroc(scores, labels);
  b.replay_size = p.val_replay.size();

  b.gains = FitGainTable(p.val_replay, nodes, config.calibration.per_node,
                         config.calibration.m_min);
  b.calibrator = InitCalibrator(p.val_replay, nodes, config.calibration.bins,
                                config.screening.alpha);
  b.cdf_seeds.assign(static_cast<std::size_t>(nodes), {});
  for (const ReplayRecord& r : p.val_replay) {
    b.cdf_seeds[r.node].push_back(r.calibrated_score);
  }
  for (auto& seeds : b.cdf_seeds) {
    const std::size_t keep = static_cast<std::size_t>(config.screening.w_cdf);
    if (seeds.size() > keep) seeds.erase(seeds.begin(), seeds.end() - keep);
  }

  b.prior1 = {0.5, 0.5};
  b.prior2 = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  if (config.fusion.prior == "inverse_loss") {
    std::array<double, 3> mean{};
    for (const ReplayRecord& r : p.val_replay) {
      for (int k = 0; k < 3; ++k) mean[k] += r.branch_loss[k];
    }
    std::array<double, 3> inv{};
    for (int k = 0; k < 3; ++k) {
      inv[k] = 1.0 / std::max(mean[k] / static_cast<double>(p.val_replay.size()),
                              1e-9);
    }
    b.prior1 = {inv[0] / (inv[0] + inv[1]), inv[1] / (inv[0] + inv[1])};
    const double t = inv[0] + inv[1] + inv[2];
    b.prior2 = {inv[0] / t, inv[1] / t, inv[2] / t};
  }

  const Budgets budgets = config.BudgetsFor(p.data.node_ids);
  b.str_threshold = config.sim.str_threshold
                        ? *config.sim.str_threshold
                        : TuneStrThreshold(p.val_replay, budgets,
                                           config.LatencyFor(p.data.node_ids),
                                           config.KappaFor(p.data.node_ids));

  std::vector<double> ramps;
  for (const Sample& s : train) ramps.push_back(RampMagnitude(s));
  b.ramp_threshold = Quantile(ramps, config.sim.ramp_quantile);
  std::vector<double> oods;
  for (const ReplayRecord& r : p.val_replay) oods.push_back(r.features.o);
  b.ood_threshold = Quantile(oods, config.sim.ood_quantile);
  return p;
}

Prepared Prepare(const RunConfig& config) {
  Dataset data = LoadDataset(config);
  BranchModels models = TrainModels(data, config);
  return PrepareWith(config, std::move(data), std::move(models));
}

Evaluation PrepareEvaluation(const Dataset& data, const BranchModels& models,
                             const Bundle& bundle, const RunConfig& config) {
  Evaluation ev;
  ev.test = data.split.test;
  if (config.sim.max_slots && !ev.test.empty()) {
    const std::int64_t first = ev.test.front().window.slot;
    std::int64_t distinct = 0, last = first - 1;
    std::size_t keep = 0;
    for (; keep < ev.test.size(); ++keep) {
      const std::int64_t slot = ev.test[keep].window.slot;
      if (slot != last) {
        if (++distinct > *config.sim.max_slots) break;
        last = slot;
      }
    }
    ev.test.resize(keep);
  }
  ev.base = BuildRetrievalBase(data, models,
                               {&data.split.val});
  const CaseBase replay_base = BuildRetrievalBase(
      data, models, {&data.split.val, &ev.test});
  ev.test_replay =
      BuildReplaySet(ev.test, models, replay_base, bundle.ood,
                     bundle.mutation, ReplayOptionsFor(config));
  AssignScores(ev.test_replay, bundle.screening);
  return ev;
}

}  // namespace pvroute
