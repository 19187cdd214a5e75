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

#ifndef PVROUTE_RIDGE_H_
#define PVROUTE_RIDGE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace pvroute {

// Affine multi-output map y = intercept + coef * x, coefficients row-major
// (outputs x inputs) in raw input units.
struct LinearMap {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> coef;
  std::vector<double> intercept;

  // Throws DimensionError if x has the wrong length.
  std::vector<double> Apply(std::span<const double> x) const;
  friend bool operator==(const LinearMap&, const LinearMap&) = default;
};

// Ridge regression on standardized inputs with an unpenalized intercept:
// minimizes sum_i |y_i - b - W z_i|^2 + lambda |W|^2, then maps W back to raw
// input units. Columns with zero variance get a zero coefficient. `rows`
// selects (with repetition) which samples enter the fit; empty means all.
LinearMap FitRidge(std::span<const std::vector<double>> x,
                   std::span<const std::vector<double>> y, double lambda,
                   std::span<const std::size_t> rows = {});

}  // namespace pvroute

#endif  // PVROUTE_RIDGE_H_
