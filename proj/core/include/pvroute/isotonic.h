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

#ifndef PVROUTE_ISOTONIC_H_
#define PVROUTE_ISOTONIC_H_

#include <limits>
#include <span>
#include <vector>

namespace pvroute {

inline constexpr double kInfiniteThreshold =
    std::numeric_limits<double>::infinity();

// Right-continuous nondecreasing step function: value[k] on
// [breaks[k], breaks[k+1]), value[0] left of breaks[0], value.back() from
// breaks.back() on.
class StepFunction {
 public:
  StepFunction() = default;
  // Throws DataError unless breaks are strictly increasing and sizes match.
  StepFunction(std::vector<double> breaks, std::vector<double> values);
  static StepFunction Constant(double value);

  double operator()(double s) const;
  bool empty() const { return values_.empty(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  bool IsNondecreasing() const;
  double max_value() const;

  // inf{s >= 0 : f(s) >= level}, or kInfiniteThreshold if never.
  double FirstAtLeast(double level) const;
  // inf{s >= 0 : f(s) > level}, or kInfiniteThreshold if never.
  double FirstAbove(double level) const;

  friend StepFunction operator+(const StepFunction& a, const StepFunction& b);
  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  template <typename Pred>
  double FirstWhere(Pred pred) const;

  std::vector<double> breaks_;
  std::vector<double> values_;
};

// Weighted least-squares nondecreasing fit by pool-adjacent-violators.
// Returns one fitted value per input point. Throws DataError on empty or
// mismatched input, nonpositive weights, or unsorted xs.
std::vector<double> PavaFit(std::span<const double> xs,
                            std::span<const double> ys,
                            std::span<const double> weights);

// PAVA fit as a step function with one step per distinct fitted level.
// Ties in x are pooled by weighted mean first. Empty weights means unit
// weights.
StepFunction FitIsotonic(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> weights = {});

}  // namespace pvroute

#endif  // PVROUTE_ISOTONIC_H_
