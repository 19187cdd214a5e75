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

#ifndef PVROUTE_EXPERIMENT_H_
#define PVROUTE_EXPERIMENT_H_

#include <optional>
#include <string>
#include <vector>

#include "pvroute/calibration.h"
#include "pvroute/case_base.h"
#include "pvroute/config.h"
#include "pvroute/data.h"
#include "pvroute/predictors.h"
#include "pvroute/router.h"
#include "pvroute/screening.h"

namespace pvroute {

struct Dataset {
  std::vector<std::string> node_ids;
  std::vector<double> capacity;
  FeatureLayout layout;
  SlotGrid grid;
  Split split;  // samples sorted by (slot, node)
  std::size_t rows = 0;
  std::size_t dropped_rows = 0;
  std::size_t clamped_power = 0;
};

// Synthetic generation (seeded by config.seed) or CSV loading, followed by
// sample construction and the chronological split.
Dataset LoadDataset(const RunConfig& config);
Dataset BuildDataset(const std::vector<RawSeries>& series,
                     const RunConfig& config);

// Everything `prepare` produces besides the branch models.
struct Bundle {
  int horizon = 0;
  int lags = 0;
  std::vector<std::string> node_ids;
  ScreeningWeights screening;
  OodReference ood;
  MutationScale mutation;
  GainTable gains;
  ExecutedModeCalibrator calibrator;
  std::vector<std::vector<double>> cdf_seeds;  // per node, oldest first
  double str_threshold = 0.0;
  double ramp_threshold = 0.0;
  double ood_threshold = 0.0;
  std::vector<double> prior1;
  std::vector<double> prior2;
  std::optional<double> replay_auroc;
  std::size_t replay_size = 0;
  bool screening_degenerate = false;

  friend bool operator==(const Bundle&, const Bundle&) = default;
};

struct Prepared {
  Dataset data;
  BranchModels models;
  Bundle bundle;
  std::vector<ReplayRecord> val_replay;
};

// Largest one-step change over [last_power, target...].
double RampMagnitude(const Sample& sample);

// Linear-interpolation quantile; throws DataError on empty input.
double Quantile(std::vector<double> values, double q);

BranchModels TrainModels(const Dataset& data, const RunConfig& config);

// Case base over the training windows, optionally extended by `extra`.
CaseBase BuildRetrievalBase(const Dataset& data, const BranchModels& models,
                            const std::vector<const std::vector<Sample>*>& extra);

// Smallest threshold whose validation usage satisfies every budget when
// STR escalates scores at or above it.
double TuneStrThreshold(const std::vector<ReplayRecord>& replay,
                        const Budgets& budgets, const LatencyParams& latency,
                        const std::vector<double>& kappa);

Prepared Prepare(const RunConfig& config);

// Builds the bundle from trained models on an existing dataset.
Prepared PrepareWith(const RunConfig& config, Dataset data,
                     BranchModels models);

struct Evaluation {
  CaseBase base;  // train and validation windows
  std::vector<Sample> test;
  std::vector<ReplayRecord> test_replay;  // oracle labels for the test split
};

// `max_slots` keeps the first slots of the test split only.
Evaluation PrepareEvaluation(const Dataset& data, const BranchModels& models,
                             const Bundle& bundle, const RunConfig& config);
inline Evaluation PrepareEvaluation(const Prepared& prepared,
                                    const RunConfig& config) {
  return PrepareEvaluation(prepared.data, prepared.models, prepared.bundle,
                           config);
}

}  // namespace pvroute

#endif  // PVROUTE_EXPERIMENT_H_
