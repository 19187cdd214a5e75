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

#ifndef PVROUTE_CALIBRATION_H_
#define PVROUTE_CALIBRATION_H_

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pvroute/case_base.h"
#include "pvroute/isotonic.h"
#include "pvroute/predictors.h"
#include "pvroute/screening.h"
#include "pvroute/types.h"

namespace pvroute {

struct ReplayRecord {
  int node = 0;
  std::int64_t slot = 0;
  ScreeningFeatures features;
  double calibrated_score = 0.0;  // filled once screening weights exist
  std::array<double, 3> loss{};   // realized loss of modes 0, 1, 2
  std::array<double, 3> branch_loss{};  // single-branch loss of e, s, c
  int oracle_label = 0;
  bool cloud_fallback = false;

  double loss0() const { return loss[0]; }
  double loss1() const { return loss[1]; }
  double loss2() const { return loss[2]; }
};

// 1 iff mode 2 attains the minimum replayed loss; ties count as positive.
inline int OracleLabel(const std::array<double, 3>& loss) {
  return loss[2] <= std::min(loss[0], loss[1]) ? 1 : 0;
}

// Mode losses with uniform fusion weights over each active set.
std::array<double, 3> ReplayLosses(const HorizonVector& target,
                                   const Candidates& candidates,
                                   const LossSpec& spec);

struct ReplayOptions {
  int k = 8;
  double temperature = 1.0;
  LossSpec loss;
  int threads = 1;
};

// Evaluates every mode on every sample. `base` must already hold every case
// that may be retrieved; the temporal filter hides those not yet revealed at
// each sample's slot. Records keep the order of `samples`.
std::vector<ReplayRecord> BuildReplaySet(const std::vector<Sample>& samples,
                                         const BranchModels& models,
                                         const CaseBase& base,
                                         const OodReference& ood,
                                         const MutationScale& mutation,
                                         const ReplayOptions& options);

void AssignScores(std::vector<ReplayRecord>& replay,
                  const ScreeningWeights& weights);

struct GainCurves {
  StepFunction g1;
  StepFunction g2;
  StepFunction g12;  // g1 + g2
  friend bool operator==(const GainCurves&, const GainCurves&) = default;
};

GainCurves MakeGainCurves(StepFunction g1, StepFunction g2);

struct GainTable {
  GainCurves pooled;
  std::vector<GainCurves> per_node;
  std::vector<bool> node_specific;

  const GainCurves& For(int node) const;
  friend bool operator==(const GainTable&, const GainTable&) = default;
};

// g1 fits (score, loss0 - loss1) and g2 fits (score, loss1 - loss2), both by
// isotonic regression. Throws DataError on an empty replay.
GainCurves FitGainCurves(const std::vector<ReplayRecord>& replay);
GainTable FitGainTable(const std::vector<ReplayRecord>& replay, int nodes,
                       bool per_node, int min_records = 50);

// Binned running means of realized loss per (node, mode) over the calibrated
// score axis [0, s_max].
class ExecutedModeCalibrator {
 public:
  ExecutedModeCalibrator() = default;
  ExecutedModeCalibrator(int nodes, int bins, double s_max);

  void Update(int node, Mode mode, double score, double loss);
  // Bin mean; falls back to the (node, mode) mean, then the all-node mode
  // mean, then 0.
  double Estimate(int node, Mode mode, double score) const;

  int nodes() const { return nodes_; }
  int bins() const { return bins_; }
  double s_max() const { return s_max_; }
  int BinOf(double score) const;
  double mean(int node, Mode mode, int bin) const;
  std::int64_t count(int node, Mode mode, int bin) const;
  void Set(int node, Mode mode, int bin, double mean, std::int64_t count);

  friend bool operator==(const ExecutedModeCalibrator&,
                         const ExecutedModeCalibrator&) = default;

 private:
  std::size_t Index(int node, Mode mode, int bin) const;

  int nodes_ = 0;
  int bins_ = 0;
  double s_max_ = 1.0;
  std::vector<double> mean_;
  std::vector<std::int64_t> count_;
};

// Seeds every (node, mode) from the replay's counterfactual losses.
ExecutedModeCalibrator InitCalibrator(const std::vector<ReplayRecord>& replay,
                                      int nodes, int bins, double s_max);

// (l0, l0 - g1, l0 - g1 - g2), each clamped at 0.
std::array<double, 3> SurrogateLosses(const ExecutedModeCalibrator& calibrator,
                                      const GainCurves& gains, int node,
                                      double score);

}  // namespace pvroute

#endif  // PVROUTE_CALIBRATION_H_
