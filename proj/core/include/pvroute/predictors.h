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

#ifndef PVROUTE_PREDICTORS_H_
#define PVROUTE_PREDICTORS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pvroute/case_base.h"
#include "pvroute/data.h"
#include "pvroute/ridge.h"
#include "pvroute/types.h"

namespace pvroute {

// Site expert: ridge map from window features to the H-step target.
struct ExpertModel {
  std::string node_id;
  int horizon = 0;
  LinearMap map;
  bool persistence = false;  // fallback when trained on no samples

  HorizonVector Predict(const ObservationWindow& window) const;
  friend bool operator==(const ExpertModel&, const ExpertModel&) = default;
};

// Shared small model: B bootstrap replicas of a pooled ridge fit.
struct SmallModel {
  int horizon = 0;
  std::vector<LinearMap> replicas;
  bool persistence = false;

  // Per-replica clamped predictions.
  std::vector<HorizonVector> PredictReplicas(
      const ObservationWindow& window) const;
  // Point prediction: mean of the replica predictions.
  HorizonVector Predict(const ObservationWindow& window) const;
  friend bool operator==(const SmallModel&, const SmallModel&) = default;
};

struct RidgeOptions {
  double lambda = 1e-3;
};

ExpertModel TrainExpert(const std::vector<Sample>& node_train,
                        const std::string& node_id, int horizon,
                        const RidgeOptions& options = {});
// Throws ConfigError if replicas < 2.
SmallModel TrainSmall(const std::vector<Sample>& pooled_train, int horizon,
                      int replicas, std::uint64_t seed,
                      const RidgeOptions& options = {});

// Query map h: z-scored most recent lags and covariates, followed by the raw
// first-harmonic calendar encoding. Statistics are frozen from the training split.
struct QueryEncoder {
  int lags = 24;        // lag block length of the window features
  int query_lags = 8;   // most recent lags used in the key
  int covariates = 0;
  int harmonics = 1;
  std::vector<double> mean;  // over the z-scored block
  std::vector<double> scale;

  std::size_t dim() const { return mean.size() + 2; }
  std::vector<double> Encode(const ObservationWindow& window) const;
  friend bool operator==(const QueryEncoder&, const QueryEncoder&) = default;
};

QueryEncoder FitQueryEncoder(const std::vector<Sample>& train,
                             const FeatureLayout& layout, int query_lags);

struct SupportEntry {
  std::vector<double> key;
  HorizonVector trajectory;
  double distance = 0.0;
  std::int64_t end_slot = 0;
};
using SupportSet = std::vector<SupportEntry>;

// K nearest cases among those with end_slot < current_slot. Throws
// ConfigError if k < 1.
SupportSet RetrieveSupport(const CaseBase& base, std::span<const double> query,
                           int k, std::int64_t current_slot);

struct CloudContext {
  std::vector<double> context;  // length H, entries in [0,1]
  double dispersion = 0.0;
};

// Softmax(-distance / temperature) weighted mean trajectory and the weighted
// standard deviation averaged over the horizon. Throws DataError on an empty
// support.
CloudContext BuildContext(const SupportSet& support, double temperature);

// Conditional regressor f^c over [window features, context, dispersion].
struct ConditionalRegressor {
  int horizon = 0;
  LinearMap map;
  bool untrained = false;  // no training sample had a nonempty support

  HorizonVector Predict(const ObservationWindow& window,
                        const CloudContext& context) const;
  friend bool operator==(const ConditionalRegressor&,
                         const ConditionalRegressor&) = default;
};

std::vector<double> CloudInput(const ObservationWindow& window,
                               const CloudContext& context);

struct CloudTrainOptions {
  int k = 8;
  double temperature = 1.0;
  double lambda = 1e-3;
  int stride = 1;  // use every stride-th training sample
};

// Each training sample is paired with the context retrieved for it from
// `base` under the temporal filter; samples with no eligible case are
// skipped.
ConditionalRegressor TrainCloudRegressor(const std::vector<Sample>& train,
                                         const QueryEncoder& encoder,
                                         const CaseBase& base,
                                         const CloudTrainOptions& options);

struct CloudOutput {
  HorizonVector prediction;
  bool fallback = false;  // support was empty, small-model output used
  std::size_t support_size = 0;
};

struct BranchModels {
  int horizon = 0;
  FeatureLayout layout;
  std::vector<ExpertModel> experts;  // indexed by node
  SmallModel small;
  QueryEncoder encoder;
  ConditionalRegressor cloud;
  std::uint64_t seed = 0;

  // Retrieval, context and regression for one window. `small_prediction`
  // is returned verbatim on an empty support.
  CloudOutput PredictCloud(const CaseBase& base,
                           const ObservationWindow& window, int k,
                           double temperature,
                           const HorizonVector& small_prediction) const;
  friend bool operator==(const BranchModels&, const BranchModels&) = default;
};

}  // namespace pvroute

#endif  // PVROUTE_PREDICTORS_H_
