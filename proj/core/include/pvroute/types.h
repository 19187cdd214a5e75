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

#ifndef PVROUTE_TYPES_H_
#define PVROUTE_TYPES_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pvroute {

// Capacity-normalized multi-step trajectory. Entries are clamped into [0, 1]
// on construction, so every instance lies on the bounded prediction domain.
class HorizonVector {
 public:
  HorizonVector() = default;
  explicit HorizonVector(std::vector<double> values);
  HorizonVector(std::initializer_list<double> values);
  static HorizonVector Constant(std::size_t horizon, double value);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t h) const { return values_[h]; }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const HorizonVector&, const HorizonVector&) = default;

 private:
  std::vector<double> values_;
};

// Inference mode of one node in one slot.
enum class Mode : int { kExpertOnly = 0, kEdgeFusion = 1, kCloudAssisted = 2 };

inline constexpr std::array<Mode, 3> kAllModes = {
    Mode::kExpertOnly, Mode::kEdgeFusion, Mode::kCloudAssisted};

inline int ModeIndex(Mode mode) { return static_cast<int>(mode); }
Mode ModeFromIndex(int index);

// Forecast branches: site expert, shared small model, cloud-assisted.
enum class Branch : int { kExpert = 0, kSmall = 1, kCloud = 2 };

std::string_view BranchName(Branch branch);

// Active branch set of a mode, always ordered (e, s, c).
std::span<const Branch> ActiveBranches(Mode mode);

// A probability vector over an ordered set of branches.
class SimplexWeights {
 public:
  SimplexWeights() = default;
  // Throws ConfigError if any entry is negative, the sizes differ, or the
  // entries do not sum to one within 1e-12.
  SimplexWeights(std::vector<Branch> branches, std::vector<double> weights);

  static SimplexWeights Uniform(std::span<const Branch> branches);
  static SimplexWeights OneHot(std::span<const Branch> branches, Branch hot);

  std::size_t size() const { return weights_.size(); }
  std::span<const Branch> branches() const { return branches_; }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t k) const { return weights_[k]; }

  friend bool operator==(const SimplexWeights&,
                         const SimplexWeights&) = default;

 private:
  std::vector<Branch> branches_;
  std::vector<double> weights_;
};

using Candidates = std::map<Branch, HorizonVector>;

enum class LossKind { kMae, kWeightedMae, kHuber, kSquared };

std::string_view LossKindName(LossKind kind);
LossKind LossKindFromName(std::string_view name);

struct LossSpec {
  LossKind kind = LossKind::kMae;
  // Nonnegative, sums to one. Required for kWeightedMae; optional otherwise,
  // in which case the horizon is weighted uniformly.
  std::optional<std::vector<double>> horizon_weights;
  double huber_delta = 0.1;

  // Throws ConfigError when the weights or delta are invalid.
  void Validate() const;
};

}  // namespace pvroute

#endif  // PVROUTE_TYPES_H_
