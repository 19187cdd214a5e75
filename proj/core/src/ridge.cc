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

#include "pvroute/ridge.h"

#include <Eigen/Dense>
#include <cmath>

#include "pvroute/errors.h"

namespace pvroute {

std::vector<double> LinearMap::Apply(std::span<const double> x) const {
  if (x.size() != inputs) throw DimensionError("linear map input length");
  std::vector<double> out(intercept);
  for (std::size_t o = 0; o < outputs; ++o) {
    const double* row = coef.data() + o * inputs;
    double acc = out[o];
    for (std::size_t j = 0; j < inputs; ++j) acc += row[j] * x[j];
    out[o] = acc;
  }
  return out;
}

LinearMap FitRidge(std::span<const std::vector<double>> x,
                   std::span<const std::vector<double>> y, double lambda,
                   std::span<const std::size_t> rows) {
  if (x.size() != y.size() || x.empty()) {
    throw DimensionError("ridge: need matching, nonempty x and y");
  }
  if (lambda < 0.0) throw ConfigError("ridge: lambda must be >= 0");
  const std::size_t F = x.front().size();
  const std::size_t O = y.front().size();
  const std::size_t n = rows.empty() ? x.size() : rows.size();
  auto row_at = [&](std::size_t r) { return rows.empty() ? r : rows[r]; };

  Eigen::VectorXd mean_x = Eigen::VectorXd::Zero(F);
  Eigen::VectorXd mean_y = Eigen::VectorXd::Zero(O);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = row_at(r);
    if (x[i].size() != F || y[i].size() != O) {
      throw DimensionError("ridge: ragged rows");
    }
    mean_x += Eigen::Map<const Eigen::VectorXd>(x[i].data(), F);
    mean_y += Eigen::Map<const Eigen::VectorXd>(y[i].data(), O);
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(F, F);
  Eigen::MatrixXd xty = Eigen::MatrixXd::Zero(F, O);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = row_at(r);
    const Eigen::VectorXd dx =
        Eigen::Map<const Eigen::VectorXd>(x[i].data(), F) - mean_x;
    const Eigen::VectorXd dy =
        Eigen::Map<const Eigen::VectorXd>(y[i].data(), O) - mean_y;
    xtx.selfadjointView<Eigen::Lower>().rankUpdate(dx);
    xty.noalias() += dx * dy.transpose();
  }
  xtx = xtx.selfadjointView<Eigen::Lower>();

  // Standardize: z_j = (x_j - mean_j) / s_j with s_j = sqrt(var_j).
  std::vector<std::size_t> active;
  Eigen::VectorXd scale(F);
  for (std::size_t j = 0; j < F; ++j) {
    const double var = xtx(j, j) / static_cast<double>(n);
    scale(j) = std::sqrt(var);
    if (var > 1e-14) active.push_back(j);
  }
  const std::size_t A = active.size();
  Eigen::MatrixXd coef_raw = Eigen::MatrixXd::Zero(O, F);
  if (A > 0) {
    Eigen::MatrixXd ztz(A, A);
    Eigen::MatrixXd zty(A, O);
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t b = 0; b < A; ++b) {
        ztz(a, b) =
            xtx(active[a], active[b]) / (scale(active[a]) * scale(active[b]));
      }
      ztz(a, a) += lambda;
      zty.row(a) = xty.row(active[a]) / scale(active[a]);
    }
    const Eigen::MatrixXd w = ztz.ldlt().solve(zty);  // A x O
    for (std::size_t a = 0; a < A; ++a) {
      coef_raw.col(active[a]) = w.row(a).transpose() / scale(active[a]);
    }
  }

  LinearMap map;
  map.inputs = F;
  map.outputs = O;
  map.coef.resize(O * F);
  map.intercept.resize(O);
  for (std::size_t o = 0; o < O; ++o) {
    double b = mean_y(o);
    for (std::size_t j = 0; j < F; ++j) {
      map.coef[o * F + j] = coef_raw(o, j);
      b -= coef_raw(o, j) * mean_x(j);
    }
    map.intercept[o] = b;
  }
  return map;
}

}  // namespace pvroute
