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

#include "pvroute/loss.h"

#include <cmath>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

double HorizonWeight(const LossSpec& spec, std::size_t h, std::size_t H) {
  if (spec.horizon_weights) return (*spec.horizon_weights)[h];
  return 1.0 / static_cast<double>(H);
}

void CheckWeightsLength(const LossSpec& spec, std::size_t H) {
  if (spec.kind == LossKind::kWeightedMae && !spec.horizon_weights) {
    throw ConfigError("weighted_mae requires horizon_weights");
  }
  if (spec.horizon_weights && spec.horizon_weights->size() != H) {
    throw DimensionError("horizon weights length differs from horizon");
  }
}

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

// Pointwise loss of a residual r = prediction - target.
double PointLoss(const LossSpec& spec, double r) {
  switch (spec.kind) {
    case LossKind::kMae:
    case LossKind::kWeightedMae:
      return std::abs(r);
    case LossKind::kSquared:
      return r * r;
    case LossKind::kHuber: {
      const double a = std::abs(r);
      const double d = spec.huber_delta;
      return a <= d ? 0.5 * r * r : d * (a - 0.5 * d);
    }
  }
  return 0.0;
}

// Derivative (one subgradient) of PointLoss with respect to r.
double PointSlope(const LossSpec& spec, double r) {
  switch (spec.kind) {
    case LossKind::kMae:
    case LossKind::kWeightedMae:
      return Sign(r);
    case LossKind::kSquared:
      return 2.0 * r;
    case LossKind::kHuber: {
      const double d = spec.huber_delta;
      return std::abs(r) <= d ? r : d * Sign(r);
    }
  }
  return 0.0;
}

void CheckCandidateKeys(const Candidates& candidates,
                        std::span<const Branch> branches) {
  if (candidates.size() != branches.size()) {
    throw ConfigError("fusion weights do not cover the candidate set");
  }
  for (Branch b : branches) {
    if (!candidates.contains(b)) {
      throw ConfigError("fusion weight on branch without a candidate");
    }
  }
}

std::size_t CommonHorizon(const Candidates& candidates) {
  std::size_t H = 0;
  for (const auto& [branch, v] : candidates) {
    if (H == 0) H = v.size();
    if (v.size() != H) throw DimensionError("candidate horizons differ");
  }
  if (H == 0) throw DimensionError("empty candidates");
  return H;
}

}  // namespace

double EvalLoss(const HorizonVector& target, const HorizonVector& prediction,
                const LossSpec& spec) {
  const std::size_t H = target.size();
  if (prediction.size() != H || H == 0) {
    throw DimensionError("target/prediction horizon mismatch");
  }
  CheckWeightsLength(spec, H);
  double total = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    total += HorizonWeight(spec, h, H) * PointLoss(spec, prediction[h] - target[h]);
  }
  return total;
}

double LossUpperBound(const LossSpec& spec) {
  switch (spec.kind) {
    case LossKind::kMae:
    case LossKind::kWeightedMae:
    case LossKind::kSquared:
      return 1.0;
    case LossKind::kHuber: {
      const double d = spec.huber_delta;
      return d >= 1.0 ? 0.5 : d * (1.0 - 0.5 * d);
    }
  }
  return 1.0;
}

HorizonVector FuseCandidates(const Candidates& candidates,
                             const SimplexWeights& weights) {
  CheckCandidateKeys(candidates, weights.branches());
  const std::size_t H = CommonHorizon(candidates);
  std::vector<double> out(H, 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const HorizonVector& c = candidates.at(weights.branches()[k]);
    for (std::size_t h = 0; h < H; ++h) out[h] += weights[k] * c[h];
  }
  return HorizonVector(std::move(out));
}

std::vector<double> LossSubgradientWeights(const HorizonVector& target,
                                           const Candidates& candidates,
                                           const SimplexWeights& weights,
                                           const LossSpec& spec) {
  const HorizonVector fused = FuseCandidates(candidates, weights);
  const std::size_t H = fused.size();
  if (target.size() != H) throw DimensionError("target horizon mismatch");
  CheckWeightsLength(spec, H);
  std::vector<double> grad(weights.size(), 0.0);
  for (std::size_t h = 0; h < H; ++h) {
    const double slope =
        HorizonWeight(spec, h, H) * PointSlope(spec, fused[h] - target[h]);
    if (slope == 0.0) continue;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      grad[k] += slope * candidates.at(weights.branches()[k])[h];
    }
  }
  return grad;
}

double FusionObjective(const HorizonVector& target,
                       const Candidates& candidates,
                       const std::vector<double>& weights,
                       const LossSpec& spec) {
  if (weights.size() != candidates.size()) {
    throw DimensionError("weight vector does not match candidate count");
  }
  const std::size_t H = CommonHorizon(candidates);
  if (target.size() != H) throw DimensionError("target horizon mismatch");
  CheckWeightsLength(spec, H);
  double total = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    double fused = 0.0;
    std::size_t k = 0;
    for (const auto& [branch, v] : candidates) fused += weights[k++] * v[h];
    total += HorizonWeight(spec, h, H) * PointLoss(spec, fused - target[h]);
  }
  return total;
}

}  // namespace pvroute
