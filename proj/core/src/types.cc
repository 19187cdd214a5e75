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

#include "pvroute/types.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

constexpr std::array<Branch, 1> kExpertSet = {Branch::kExpert};
constexpr std::array<Branch, 2> kEdgeSet = {Branch::kExpert, Branch::kSmall};
constexpr std::array<Branch, 3> kCloudSet = {Branch::kExpert, Branch::kSmall,
                                             Branch::kCloud};

double ClampUnit(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

HorizonVector::HorizonVector(std::vector<double> values)
    : values_(std::move(values)) {
  for (double& v : values_) v = ClampUnit(v);
}

HorizonVector::HorizonVector(std::initializer_list<double> values)
    : HorizonVector(std::vector<double>(values)) {}

HorizonVector HorizonVector::Constant(std::size_t horizon, double value) {
  return HorizonVector(std::vector<double>(horizon, value));
}

Mode ModeFromIndex(int index) {
  if (index < 0 || index > 2) {
    throw ConfigError("mode index out of range: " + std::to_string(index));
  }
  return static_cast<Mode>(index);
}

std::string_view BranchName(Branch branch) {
  switch (branch) {
    case Branch::kExpert:
      return "e";
    case Branch::kSmall:
      return "s";
    case Branch::kCloud:
      return "c";
  }
  return "?";
}

std::span<const Branch> ActiveBranches(Mode mode) {
  switch (mode) {
    case Mode::kExpertOnly:
      return kExpertSet;
    case Mode::kEdgeFusion:
      return kEdgeSet;
    case Mode::kCloudAssisted:
      return kCloudSet;
  }
  return {};
}

SimplexWeights::SimplexWeights(std::vector<Branch> branches,
                               std::vector<double> weights)
    : branches_(std::move(branches)), weights_(std::move(weights)) {
  if (branches_.size() != weights_.size() || weights_.empty()) {
    throw ConfigError("simplex weights: branch/weight size mismatch");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ConfigError("simplex weights: negative entry");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("simplex weights: entries do not sum to one");
  }
}

SimplexWeights SimplexWeights::Uniform(std::span<const Branch> branches) {
  const std::size_t n = branches.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // Put any rounding slack on the last entry so the sum is exact.
  double head = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) head += w[k];
  w[n - 1] = 1.0 - head;
  return SimplexWeights({branches.begin(), branches.end()}, std::move(w));
}

SimplexWeights SimplexWeights::OneHot(std::span<const Branch> branches,
                                      Branch hot) {
  std::vector<double> w(branches.size(), 0.0);
  bool found = false;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    if (branches[k] == hot) {
      w[k] = 1.0;
      found = true;
    }
  }
  if (!found) throw ConfigError("one-hot branch not in active set");
  return SimplexWeights({branches.begin(), branches.end()}, std::move(w));
}

std::string_view LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kMae:
      return "mae";
    case LossKind::kWeightedMae:
      return "weighted_mae";
    case LossKind::kHuber:
      return "huber";
    case LossKind::kSquared:
      return "squared";
  }
  return "?";
}

LossKind LossKindFromName(std::string_view name) {
  if (name == "mae") return LossKind::kMae;
  if (name == "weighted_mae") return LossKind::kWeightedMae;
  if (name == "huber") return LossKind::kHuber;
  if (name == "squared") return LossKind::kSquared;
  throw ConfigError("unknown loss kind: " + std::string(name));
}

void LossSpec::Validate() const {
  if (!(huber_delta > 0.0)) throw ConfigError("huber_delta must be positive");
  if (kind == LossKind::kWeightedMae && !horizon_weights) {
    throw ConfigError("weighted_mae requires horizon_weights");
  }
  if (horizon_weights) {
    double total = 0.0;
    for (double w : *horizon_weights) {
      if (!(w >= 0.0)) throw ConfigError("horizon weights must be >= 0");
      total += w;
    }
    if (horizon_weights->empty() || std::abs(total - 1.0) > 1e-9) {
      throw ConfigError("horizon weights must sum to one");
    }
  }
}

}  // namespace pvroute
