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

#ifndef PVROUTE_LOSS_H_
#define PVROUTE_LOSS_H_

#include <vector>

#include "pvroute/types.h"

namespace pvroute {

// Horizon-weighted loss between a revealed target and a prediction.
// Throws DimensionError on length mismatch.
double EvalLoss(const HorizonVector& target, const HorizonVector& prediction,
                const LossSpec& spec = {});

// Upper bound of EvalLoss over [0,1]^H for the given loss kind.
double LossUpperBound(const LossSpec& spec);

// Convex combination of the candidates under `weights`. The weight branches
// must match the candidate keys exactly (ConfigError otherwise).
HorizonVector FuseCandidates(const Candidates& candidates,
                             const SimplexWeights& weights);

// One subgradient of w -> EvalLoss(target, FuseCandidates(candidates, w)),
// ordered like weights.branches(). sign(0) is taken as 0.
std::vector<double> LossSubgradientWeights(const HorizonVector& target,
                                           const Candidates& candidates,
                                           const SimplexWeights& weights,
                                           const LossSpec& spec = {});

// Same objective evaluated at an arbitrary point of the simplex given as a
// raw vector in candidate-key order. Used by solvers that leave the
// validated SimplexWeights type during line searches.
double FusionObjective(const HorizonVector& target,
                       const Candidates& candidates,
                       const std::vector<double>& weights,
                       const LossSpec& spec = {});

}  // namespace pvroute

#endif  // PVROUTE_LOSS_H_
