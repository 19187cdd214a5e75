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

#ifndef PVROUTE_SIM_H_
#define PVROUTE_SIM_H_

#include <string>
#include <string_view>

#include "pvroute/config.h"
#include "pvroute/experiment.h"
#include "pvroute/metrics.h"
#include "pvroute/trace.h"

namespace pvroute {

enum class PolicyKind { kCape, kExo, kEdo, kCo, kAca, kStr };

struct Policy {
  PolicyKind kind = PolicyKind::kCape;
  // STR only; the bundle's tuned threshold is used when unset.
  std::optional<double> threshold;
};

// "CAPE", "ExO", "EdO", "CO", "ACA", "STR" or "STR:<threshold>",
// case-insensitive. Throws ConfigError.
Policy ParsePolicy(std::string_view name);
std::string PolicyName(const Policy& policy);

// Whether the policy can ever request the cloud branch.
bool UsesCloud(PolicyKind kind);

// Runs the slot loop over `evaluation.test`. Throws ConfigError when the
// bundle, models and configuration disagree on horizon or nodes.
SlotTrace RunSimulation(const Dataset& data, const BranchModels& models,
                        const Bundle& bundle, const Evaluation& evaluation,
                        const RunConfig& config, const Policy& policy);

inline SlotTrace RunSimulation(const Prepared& prepared,
                               const Evaluation& evaluation,
                               const RunConfig& config, const Policy& policy) {
  return RunSimulation(prepared.data, prepared.models, prepared.bundle,
                       evaluation, config, policy);
}

// Constants for the diagnostic property checks.
struct PropertyCheckConfig {
  // Lipschitz constant of the loss in its prediction, w.r.t. the
  // mean-absolute norm (1 for uniform MAE).
  double loss_lipschitz = 1.0;
  double tolerance = 1e-9;
};

// One test point of the retrieval-gap check. `oracle` is the reference
// predictor f*, evaluated at the retrieved context z and the oracle z*.
struct RetrievalGapCase {
  HorizonVector target;
  HorizonVector learned;         // f(X, z)
  HorizonVector oracle_at_z;     // f*(X, z)
  HorizonVector oracle_at_star;  // f*(X, z*)
  double context_distance = 0.0;  // ||z - z*||
};

struct RetrievalGapReport {
  std::size_t points = 0;
  std::size_t violations = 0;
  double eps_pred = 0.0;    // max_i ||learned - oracle_at_z||, mean-absolute
  double max_excess = 0.0;  // max_i (gap_i - bound_i); <= 0 when it holds
};

// |loss(learned) - loss(oracle_at_star)| <= L * (eps_pred + lz * distance)
// at every point, with eps_pred measured over the same points. Throws
// DataError on an empty set.
RetrievalGapReport CheckRetrievalGap(const std::vector<RetrievalGapCase>& cases,
                                     double lz, const PropertyCheckConfig& check,
                                     const LossSpec& spec = {});

// NaN-free JSON: undefined metrics become null.
Json MetricsToJson(const MetricReport& report);

// Metrics, counters and the resolved configuration of one run.
Json RunSummary(const RunConfig& config, const Policy& policy,
                const SlotTrace& trace, const MetricReport& report);

}  // namespace pvroute

#endif  // PVROUTE_SIM_H_
