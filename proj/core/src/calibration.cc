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

#include "pvroute/calibration.h"

#include <cmath>

#include "pvroute/errors.h"
#include "pvroute/loss.h"
#include "pvroute/parallel.h"

namespace pvroute {

std::array<double, 3> ReplayLosses(const HorizonVector& target,
                                   const Candidates& candidates,
                                   const LossSpec& spec) {
  std::array<double, 3> loss{};
  for (Mode mode : kAllModes) {
    const auto active = ActiveBranches(mode);
    Candidates subset;
    for (Branch b : active) subset.emplace(b, candidates.at(b));
    loss[ModeIndex(mode)] = EvalLoss(
        target, FuseCandidates(subset, SimplexWeights::Uniform(active)), spec);
  }
  return loss;
}

std::vector<ReplayRecord> BuildReplaySet(const std::vector<Sample>& samples,
                                         const BranchModels& models,
                                         const CaseBase& base,
                                         const OodReference& ood,
                                         const MutationScale& mutation,
                                         const ReplayOptions& options) {
  std::vector<ReplayRecord> out(samples.size());
  ParallelFor(samples.size(), options.threads, [&](std::size_t i) {
    const Sample& s = samples[i];
    const ObservationWindow& w = s.window;
    const HorizonVector expert = models.experts.at(w.node).Predict(w);
    const auto replicas = models.small.PredictReplicas(w);
    const HorizonVector small = models.small.Predict(w);
    const CloudOutput cloud = models.PredictCloud(base, w, options.k,
                                                  options.temperature, small);
    ReplayRecord& r = out[i];
    r.node = w.node;
    r.slot = w.slot;
    r.features = ComputeFeatures(w, expert, replicas, small, models.encoder,
                                 ood, mutation);
    r.cloud_fallback = cloud.fallback;
    const Candidates candidates = {{Branch::kExpert, expert},
                                   {Branch::kSmall, small},
                                   {Branch::kCloud, cloud.prediction}};
    r.loss = ReplayLosses(s.target, candidates, options.loss);
    r.branch_loss = {EvalLoss(s.target, expert, options.loss),
                     EvalLoss(s.target, small, options.loss),
                     EvalLoss(s.target, cloud.prediction, options.loss)};
    r.oracle_label = OracleLabel(r.loss);
  });
  return out;
}

void AssignScores(std::vector<ReplayRecord>& replay,
                  const ScreeningWeights& weights) {
  for (ReplayRecord& r : replay) {
    r.calibrated_score = CalibratedScore(r.features, weights);
  }
}

GainCurves MakeGainCurves(StepFunction g1, StepFunction g2) {
  GainCurves g;
  g.g12 = g1 + g2;
  g.g1 = std::move(g1);
  g.g2 = std::move(g2);
  return g;
}

const GainCurves& GainTable::For(int node) const {
  if (node >= 0 && static_cast<std::size_t>(node) < per_node.size() &&
      node_specific[node]) {
    return per_node[node];
  }
  return pooled;
}

GainCurves FitGainCurves(const std::vector<ReplayRecord>& replay) {
  if (replay.empty()) throw DataError("gains: empty replay");
  std::vector<std::size_t> order(replay.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return replay[a].calibrated_score < replay[b].calibrated_score;
  });
  std::vector<double> xs, gap01, gap12;
  xs.reserve(order.size());
  for (std::size_t i : order) {
    const ReplayRecord& r = replay[i];
    xs.push_back(r.calibrated_score);
    gap01.push_back(r.loss0() - r.loss1());
    gap12.push_back(r.loss1() - r.loss2());
  }
  return MakeGainCurves(FitIsotonic(xs, gap01), FitIsotonic(xs, gap12));
}

GainTable FitGainTable(const std::vector<ReplayRecord>& replay, int nodes,
                       bool per_node, int min_records) {
  GainTable table;
  table.pooled = FitGainCurves(replay);
  table.per_node.resize(static_cast<std::size_t>(nodes));
  table.node_specific.assign(static_cast<std::size_t>(nodes), false);
  if (!per_node) return table;
  for (int n = 0; n < nodes; ++n) {
    std::vector<ReplayRecord> mine;
    for (const ReplayRecord& r : replay) {
      if (r.node == n) mine.push_back(r);
    }
    if (static_cast<int>(mine.size()) >= min_records && !mine.empty()) {
      table.per_node[n] = FitGainCurves(mine);
      table.node_specific[n] = true;
    }
  }
  return table;
}

ExecutedModeCalibrator::ExecutedModeCalibrator(int nodes, int bins,
                                               double s_max)
    : nodes_(nodes), bins_(bins), s_max_(s_max) {
  if (nodes < 1 || bins < 1) throw ConfigError("calibrator: nodes, bins >= 1");
  if (!(s_max > 0.0)) throw ConfigError("calibrator: s_max must be > 0");
  const std::size_t size = static_cast<std::size_t>(nodes) * 3 *
                           static_cast<std::size_t>(bins);
  mean_.assign(size, 0.0);
  count_.assign(size, 0);
}

int ExecutedModeCalibrator::BinOf(double score) const {
  const double pos = score / s_max_ * bins_;
  if (!(pos > 0.0)) return 0;
  return std::min(static_cast<int>(pos), bins_ - 1);
}

std::size_t ExecutedModeCalibrator::Index(int node, Mode mode, int bin) const {
  if (node < 0 || node >= nodes_) throw DimensionError("calibrator: node");
  return (static_cast<std::size_t>(node) * 3 +
          static_cast<std::size_t>(ModeIndex(mode))) *
             static_cast<std::size_t>(bins_) +
         static_cast<std::size_t>(bin);
}

void ExecutedModeCalibrator::Update(int node, Mode mode, double score,
                                    double loss) {
  const std::size_t k = Index(node, mode, BinOf(score));
  count_[k] += 1;
  mean_[k] += (loss - mean_[k]) / static_cast<double>(count_[k]);
}

double ExecutedModeCalibrator::Estimate(int node, Mode mode,
                                        double score) const {
  const std::size_t k = Index(node, mode, BinOf(score));
  if (count_[k] > 0) return mean_[k];
  auto pooled = [&](int lo, int hi) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (int v = lo; v < hi; ++v) {
      for (int b = 0; b < bins_; ++b) {
        const std::size_t j = Index(v, mode, b);
        sum += mean_[j] * static_cast<double>(count_[j]);
        n += count_[j];
      }
    }
    return n > 0 ? sum / static_cast<double>(n) : -1.0;
  };
  const double node_mean = pooled(node, node + 1);
  if (node_mean >= 0.0) return node_mean;
  const double all_mean = pooled(0, nodes_);
  return all_mean >= 0.0 ? all_mean : 0.0;
}

double ExecutedModeCalibrator::mean(int node, Mode mode, int bin) const {
  return mean_[Index(node, mode, bin)];
}

std::int64_t ExecutedModeCalibrator::count(int node, Mode mode,
                                           int bin) const {
  return count_[Index(node, mode, bin)];
}

void ExecutedModeCalibrator::Set(int node, Mode mode, int bin, double mean,
                                 std::int64_t count) {
  const std::size_t k = Index(node, mode, bin);
  mean_[k] = mean;
  count_[k] = count;
}

ExecutedModeCalibrator InitCalibrator(const std::vector<ReplayRecord>& replay,
                                      int nodes, int bins, double s_max) {
  ExecutedModeCalibrator cal(nodes, bins, s_max);
  for (const ReplayRecord& r : replay) {
    for (Mode mode : kAllModes) {
      cal.Update(r.node, mode, r.calibrated_score, r.loss[ModeIndex(mode)]);
    }
  }
  return cal;
}

std::array<double, 3> SurrogateLosses(const ExecutedModeCalibrator& calibrator,
                                      const GainCurves& gains, int node,
                                      double score) {
  const double l0 = calibrator.Estimate(node, Mode::kExpertOnly, score);
  const double l1 = l0 - gains.g1(score);
  const double l2 = l1 - gains.g2(score);
  return {std::max(l0, 0.0), std::max(l1, 0.0), std::max(l2, 0.0)};
}

}  // namespace pvroute
