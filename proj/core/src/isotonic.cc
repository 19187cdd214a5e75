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

#include "pvroute/isotonic.h"

#include <algorithm>

#include "pvroute/errors.h"

namespace pvroute {

StepFunction::StepFunction(std::vector<double> breaks,
                           std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (breaks_.size() != values_.size() || values_.empty()) {
    throw DataError("step function: breaks and values must match, nonempty");
  }
  for (std::size_t k = 1; k < breaks_.size(); ++k) {
    if (!(breaks_[k] > breaks_[k - 1])) {
      throw DataError("step function: breaks must be strictly increasing");
    }
  }
}

StepFunction StepFunction::Constant(double value) {
  return StepFunction({0.0}, {value});
}

double StepFunction::operator()(double s) const {
  if (values_.empty()) return 0.0;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
  if (it == breaks_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
}

bool StepFunction::IsNondecreasing() const {
  for (std::size_t k = 1; k < values_.size(); ++k) {
    if (values_[k] < values_[k - 1]) return false;
  }
  return true;
}

double StepFunction::max_value() const {
  return values_.empty() ? 0.0
                         : *std::max_element(values_.begin(), values_.end());
}

template <typename Pred>
double StepFunction::FirstWhere(Pred pred) const {
  // f is constant left of breaks[1], so the first piece covers s = 0 too.
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (pred(values_[k])) {
      return k == 0 ? 0.0 : std::max(breaks_[k], 0.0);
    }
  }
  return kInfiniteThreshold;
}

double StepFunction::FirstAtLeast(double level) const {
  if (values_.empty()) return level <= 0.0 ? 0.0 : kInfiniteThreshold;
  return FirstWhere([level](double v) { return v >= level; });
}

double StepFunction::FirstAbove(double level) const {
  if (values_.empty()) return level < 0.0 ? 0.0 : kInfiniteThreshold;
  return FirstWhere([level](double v) { return v > level; });
}

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<double> breaks;
  std::merge(a.breaks_.begin(), a.breaks_.end(), b.breaks_.begin(),
             b.breaks_.end(), std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> values;
  values.reserve(breaks.size());
  for (double x : breaks) values.push_back(a(x) + b(x));
  return StepFunction(std::move(breaks), std::move(values));
}

std::vector<double> PavaFit(std::span<const double> xs,
                            std::span<const double> ys,
                            std::span<const double> weights) {
  const std::size_t n = ys.size();
  if (n == 0) throw DataError("isotonic: empty input");
  if (xs.size() != n || weights.size() != n) {
    throw DataError("isotonic: xs, ys and weights must have equal length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) throw DataError("isotonic: weights must be > 0");
    if (i > 0 && xs[i] < xs[i - 1]) throw DataError("isotonic: xs unsorted");
  }
  // Blocks: [start, end) with weighted mean. Tied xs start in one block.
  struct Block {
    std::size_t start, end;
    double sum_w, mean;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    double sw = 0.0, swy = 0.0;
    while (j < n && xs[j] == xs[i]) {
      sw += weights[j];
      swy += weights[j] * ys[j];
      ++j;
    }
    blocks.push_back(Block{i, j, sw, swy / sw});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].mean >= blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w = prev.sum_w + top.sum_w;
      prev.mean = (prev.sum_w * prev.mean + top.sum_w * top.mean) / w;
      prev.sum_w = w;
      prev.end = top.end;
    }
    i = j;
  }
  std::vector<double> fitted(n);
  for (const Block& b : blocks) {
    std::fill(fitted.begin() + static_cast<std::ptrdiff_t>(b.start),
              fitted.begin() + static_cast<std::ptrdiff_t>(b.end), b.mean);
  }
  return fitted;
}

StepFunction FitIsotonic(std::span<const double> xs, std::span<const double> ys,
                         std::span<const double> weights) {
  std::vector<double> unit;
  if (weights.empty()) {
    unit.assign(ys.size(), 1.0);
    weights = unit;
  }
  const std::vector<double> fitted = PavaFit(xs, ys, weights);
  std::vector<double> breaks, values;
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    if (values.empty() || fitted[i] != values.back()) {
      breaks.push_back(xs[i]);
      values.push_back(fitted[i]);
    }
  }
  return StepFunction(std::move(breaks), std::move(values));
}

}  // namespace pvroute
