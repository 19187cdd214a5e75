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

#include "pvroute/screening.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pvroute/errors.h"

namespace pvroute {

OodReference::OodReference(std::vector<double> mean,
                           std::vector<double> covariance, double jitter)
    : mean_(std::move(mean)), covariance_(std::move(covariance)),
      jitter_(jitter) {
  const std::size_t d = mean_.size();
  if (covariance_.size() != d * d) {
    throw DimensionError("ood: covariance must be dim x dim");
  }
  if (!(jitter_ >= 0.0)) throw ConfigError("ood: jitter must be >= 0");
  Eigen::MatrixXd s =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>(covariance_.data(), d, d);
  s = 0.5 * (s + s.transpose());
  // Grow the jitter until the factorization succeeds; a singular covariance
  // must never raise.
  double eps = jitter_;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (int attempt = 0; attempt < 30; ++attempt) {
    llt.compute(s + eps * Eigen::MatrixXd::Identity(d, d));
    if (llt.info() == Eigen::Success) break;
    eps = eps > 0.0 ? eps * 10.0 : 1e-12;
  }
  const Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(d, d));
  precision_.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) precision_[i * d + j] = prec(i, j);
  }
}

double OodReference::Distance(std::span<const double> x) const {
  const std::size_t d = mean_.size();
  if (x.size() != d) throw DimensionError("ood: query dimension mismatch");
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - mean_[i];
  double q = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) row += precision_[i * d + j] * diff[j];
    q += diff[i] * row;
  }
  return std::sqrt(std::max(q, 0.0));
}

OodReference FitOodReference(const std::vector<std::vector<double>>& keys,
                             double jitter) {
  if (keys.empty()) throw DataError("ood: no reference keys");
  const std::size_t d = keys.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& k : keys) {
    if (k.size() != d) throw DimensionError("ood: ragged keys");
    for (std::size_t i = 0; i < d; ++i) mean[i] += k[i];
  }
  const double n = static_cast<double>(keys.size());
  for (double& m : mean) m /= n;
  std::vector<double> cov(d * d, 0.0);
  for (const auto& k : keys) {
    for (std::size_t i = 0; i < d; ++i) {
      const double di = k[i] - mean[i];
      for (std::size_t j = 0; j <= i; ++j) cov[i * d + j] += di * (k[j] - mean[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cov[i * d + j] /= n;
      cov[j * d + i] = cov[i * d + j];
    }
  }
  return OodReference(std::move(mean), std::move(cov), jitter);
}

MutationScale FitMutationScale(const std::vector<Sample>& train) {
  MutationScale scale;
  if (train.empty() || train.front().window.weather_recent.empty()) {
    return scale;
  }
  const std::size_t c = train.front().window.weather_recent.back().size();
  std::vector<double> sum(c, 0.0), sq(c, 0.0);
  double n = 0.0;
  // Latest-past covariate row of each window; consecutive windows cover
  // every training row once.
  for (const Sample& s : train) {
    const auto& row = s.window.weather_recent.back();
    for (std::size_t j = 0; j < c; ++j) {
      sum[j] += row[j];
      sq[j] += row[j] * row[j];
    }
    n += 1.0;
  }
  scale.covariate_std.resize(c);
  for (std::size_t j = 0; j < c; ++j) {
    const double m = sum[j] / n;
    const double var = std::max(sq[j] / n - m * m, 0.0);
    const double sd = std::sqrt(var);
    scale.covariate_std[j] = sd > 1e-12 ? sd : 1.0;
  }
  return scale;
}

double MutationIntensity(const std::vector<std::vector<double>>& weather_recent,
                         const MutationScale& scale) {
  const std::size_t rows = weather_recent.size();
  const std::size_t c = scale.covariate_std.size();
  if (rows < 2 || c == 0) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    double m = 0.0;
    for (const auto& r : weather_recent) m += r[j];
    m /= static_cast<double>(rows);
    double var = 0.0;
    for (const auto& r : weather_recent) var += (r[j] - m) * (r[j] - m);
    var /= static_cast<double>(rows);
    total += std::sqrt(var) / scale.covariate_std[j];
  }
  return total / static_cast<double>(c);
}

double EnsembleVariance(const std::vector<HorizonVector>& replicas) {
  if (replicas.size() < 2) return 0.0;
  const std::size_t H = replicas.front().size();
  const double b = static_cast<double>(replicas.size());
  double total = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    double m = 0.0;
    for (const auto& r : replicas) m += r[h];
    m /= b;
    double var = 0.0;
    for (const auto& r : replicas) var += (r[h] - m) * (r[h] - m);
    total += var / b;
  }
  return H > 0 ? total / static_cast<double>(H) : 0.0;
}

ScreeningFeatures ComputeFeatures(const ObservationWindow& window,
                                  const HorizonVector& expert_prediction,
                                  const std::vector<HorizonVector>& replicas,
                                  const HorizonVector& small_mean,
                                  const QueryEncoder& encoder,
                                  const OodReference& ood,
                                  const MutationScale& mutation) {
  if (expert_prediction.size() != small_mean.size()) {
    throw DimensionError("screening: prediction lengths differ");
  }
  ScreeningFeatures f;
  f.u = EnsembleVariance(replicas);
  f.o = ood.Distance(encoder.Encode(window));
  f.mu = MutationIntensity(window.weather_recent, mutation);
  double d = 0.0;
  for (std::size_t h = 0; h < small_mean.size(); ++h) {
    d += std::abs(expert_prediction[h] - small_mean[h]);
  }
  f.d = small_mean.empty() ? 0.0 : d / static_cast<double>(small_mean.size());
  return f;
}

ScreeningFeatures ComputeFeatures(const ObservationWindow& window,
                                  const HorizonVector& expert_prediction,
                                  const SmallModel& small,
                                  const QueryEncoder& encoder,
                                  const OodReference& ood,
                                  const MutationScale& mutation) {
  return ComputeFeatures(window, expert_prediction,
                         small.PredictReplicas(window), small.Predict(window),
                         encoder, ood, mutation);
}

void ScreeningWeights::Validate() const {
  for (double v : beta) {
    if (!std::isfinite(v)) throw ConfigError("screening: non-finite beta");
  }
  if (!std::isfinite(bias)) throw ConfigError("screening: non-finite bias");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("screening: alpha must be positive");
  }
  for (double s : feature_scale) {
    if (!(s > 0.0)) throw ConfigError("screening: feature scale must be > 0");
  }
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::array<double, 4> ScreeningInputs(const ScreeningFeatures& features,
                                      bool log_form) {
  auto phi = features.AsArray();
  if (!log_form) return phi;
  static constexpr std::array<double, 4> kFloor = {1e-8, 1e-3, 1e-3, 1e-4};
  for (int k = 0; k < 4; ++k) phi[k] = std::log(kFloor[k] + std::max(phi[k], 0.0));
  return phi;
}

double RoutingScore(const ScreeningFeatures& features,
                    const ScreeningWeights& weights) {
  const auto phi = ScreeningInputs(features, weights.log_features);
  double z = weights.bias;
  for (int k = 0; k < 4; ++k) {
    z += weights.beta[k] * (phi[k] - weights.feature_mean[k]) /
         weights.feature_scale[k];
  }
  // Keep the score strictly inside (0, 1) in floating point.
  return std::clamp(Sigmoid(z), 1e-15, 1.0 - 1e-15);
}

ScreeningWeights FitScreeningWeights(
    const std::vector<ScreeningFeatures>& features,
    const std::vector<int>& labels, const LogisticOptions& options) {
  if (features.empty() || features.size() != labels.size()) {
    throw DataError("screening fit: need matching, nonempty inputs");
  }
  ScreeningWeights w;
  w.alpha = options.alpha;
  w.log_features = options.log_features;
  std::vector<std::array<double, 4>> inputs;
  inputs.reserve(features.size());
  for (const auto& f : features) inputs.push_back(ScreeningInputs(f, w.log_features));
  const std::size_t n = features.size();
  const double nd = static_cast<double>(n);
  for (int k = 0; k < 4; ++k) {
    double m = 0.0;
    for (const auto& f : inputs) m += f[k];
    m /= nd;
    double var = 0.0;
    for (const auto& f : inputs) {
      const double dv = f[k] - m;
      var += dv * dv;
    }
    const double sd = std::sqrt(var / nd);
    w.feature_mean[k] = m;
    w.feature_scale[k] = sd > 1e-12 ? sd : 1.0;
  }

  std::size_t positives = 0;
  for (int y : labels) positives += y != 0 ? 1 : 0;
  if (positives == 0 || positives == n) {
    const double p = (static_cast<double>(positives) + 0.5) / (nd + 1.0);
    w.bias = std::log(p / (1.0 - p));
    w.degenerate = true;
    return w;
  }

  Eigen::MatrixXd z(n, 5);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& phi = inputs[i];
    for (int k = 0; k < 4; ++k) {
      z(i, k) = (phi[k] - w.feature_mean[k]) / w.feature_scale[k];
    }
    z(i, 4) = 1.0;
    y(i) = labels[i] != 0 ? 1.0 : 0.0;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(5, options.l2);
  penalty(4) = 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd eta = z * theta;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // log(1 + e^eta) - y * eta, evaluated stably.
      const double e = eta(i);
      loss += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) -
              y(i) * e;
    }
    return loss / nd + 0.5 * theta.dot(penalty.cwiseProduct(theta));
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(5);
  theta(4) = std::log(static_cast<double>(positives) /
                      static_cast<double>(n - positives));
  double current = objective(theta);
  for (int it = 0; it < options.iterations; ++it) {
    const Eigen::VectorXd eta = z * theta;
    Eigen::VectorXd p(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      p(i) = Sigmoid(eta(i));
      s(i) = p(i) * (1.0 - p(i));
    }
    const Eigen::VectorXd grad =
        z.transpose() * (p - y) / nd + penalty.cwiseProduct(theta);
    Eigen::MatrixXd hess = z.transpose() * s.asDiagonal() * z / nd;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    double t = 1.0;
    Eigen::VectorXd next = theta - step;
    double value = objective(next);
    while (value > current && t > 1e-8) {
      t *= 0.5;
      next = theta - t * step;
      value = objective(next);
    }
    if (value > current) break;
    const bool converged = current - value < 1e-15;
    theta = next;
    current = value;
    if (converged) break;
  }
  for (int k = 0; k < 4; ++k) w.beta[k] = theta(k);
  w.bias = theta(4);
  return w;
}

ScoreCdf::ScoreCdf(double gamma, std::size_t capacity)
    : gamma_(gamma), capacity_(capacity) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("cdf: gamma must lie in (0, 1]");
  }
  if (capacity == 0) throw ConfigError("cdf: capacity must be >= 1");
  powers_.resize(capacity);
  double p = 1.0;
  for (std::size_t k = 0; k < capacity; ++k) {
    powers_[k] = p;
    p *= gamma;
  }
}

void ScoreCdf::Update(double score) {
  scores_.push_back(score);
  if (scores_.size() > capacity_) scores_.pop_front();
}

double ScoreCdf::Eval(double threshold) const {
  if (scores_.empty()) return 0.5;
  const std::size_t n = scores_.size();
  double below = 0.0, total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = powers_[n - 1 - j];
    total += w;
    if (scores_[j] <= threshold) below += w;
  }
  return below / total;
}

}  // namespace pvroute
