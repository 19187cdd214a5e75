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

#ifndef PVROUTE_SCREENING_H_
#define PVROUTE_SCREENING_H_

#include <array>
#include <deque>
#include <span>
#include <vector>

#include "pvroute/data.h"
#include "pvroute/predictors.h"
#include "pvroute/types.h"

namespace pvroute {

struct ScreeningFeatures {
  double u = 0.0;   // small-ensemble predictive variance
  double o = 0.0;   // Mahalanobis OOD distance of the query key
  double mu = 0.0;  // weather mutation intensity
  double d = 0.0;   // expert / small disagreement

  std::array<double, 4> AsArray() const { return {u, o, mu, d}; }
  friend bool operator==(const ScreeningFeatures&,
                         const ScreeningFeatures&) = default;
};

// Mean and covariance of in-domain query keys. The precision matrix is
// derived from the covariance plus jitter on the diagonal.
class OodReference {
 public:
  OodReference() = default;
  // Throws DimensionError if the covariance is not dim x dim.
  OodReference(std::vector<double> mean, std::vector<double> covariance,
               double jitter = 1e-8);

  std::size_t dim() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& covariance() const { return covariance_; }
  double jitter() const { return jitter_; }
  // sqrt((x - m)^T (S + jitter I)^-1 (x - m)).
  double Distance(std::span<const double> x) const;

  friend bool operator==(const OodReference& a, const OodReference& b) {
    return a.mean_ == b.mean_ && a.covariance_ == b.covariance_ &&
           a.jitter_ == b.jitter_;
  }

 private:
  std::vector<double> mean_;
  std::vector<double> covariance_;  // row-major
  std::vector<double> precision_;
  double jitter_ = 1e-8;
};

OodReference FitOodReference(const std::vector<std::vector<double>>& keys,
                             double jitter = 1e-8);

// Per-covariate training standard deviations used to normalize mutation
// intensity.
struct MutationScale {
  std::vector<double> covariate_std;
  friend bool operator==(const MutationScale&, const MutationScale&) = default;
};

MutationScale FitMutationScale(const std::vector<Sample>& train);

// Mean over covariates of std(last rows) / training std. Zero when there are
// fewer than two rows or no covariates.
double MutationIntensity(const std::vector<std::vector<double>>& weather_recent,
                         const MutationScale& scale);

// Variance across replicas averaged over the horizon.
double EnsembleVariance(const std::vector<HorizonVector>& replicas);

ScreeningFeatures ComputeFeatures(const ObservationWindow& window,
                                  const HorizonVector& expert_prediction,
                                  const SmallModel& small,
                                  const QueryEncoder& encoder,
                                  const OodReference& ood,
                                  const MutationScale& mutation);

// Same, given the small replica outputs already computed for the window.
ScreeningFeatures ComputeFeatures(const ObservationWindow& window,
                                  const HorizonVector& expert_prediction,
                                  const std::vector<HorizonVector>& replicas,
                                  const HorizonVector& small_mean,
                                  const QueryEncoder& encoder,
                                  const OodReference& ood,
                                  const MutationScale& mutation);

// Logistic screening model over z-scored features.
struct ScreeningWeights {
  std::array<double, 4> beta{};
  double bias = 0.0;
  double alpha = 1.0;
  std::array<double, 4> feature_mean{};
  std::array<double, 4> feature_scale{1.0, 1.0, 1.0, 1.0};
  bool degenerate = false;  // single-class fit, beta = 0
  bool log_features = false;

  void Validate() const;
  friend bool operator==(const ScreeningWeights&,
                         const ScreeningWeights&) = default;
};

double Sigmoid(double x);

// Regressor vector of the logistic model: phi itself, or log(floor + phi)
// per component when `log_form` is set.
std::array<double, 4> ScreeningInputs(const ScreeningFeatures& features,
                                      bool log_form);

// sigma(beta . z + bias), strictly inside (0, 1).
double RoutingScore(const ScreeningFeatures& features,
                    const ScreeningWeights& weights);
inline double CalibratedScore(const ScreeningFeatures& features,
                              const ScreeningWeights& weights) {
  return weights.alpha * RoutingScore(features, weights);
}

struct LogisticOptions {
  double l2 = 1e-2;
  int iterations = 50;
  double alpha = 1.0;
  bool log_features = false;
};

// Newton iterations on the L2-penalized mean log loss. Throws DataError on
// empty or mismatched input.
ScreeningWeights FitScreeningWeights(
    const std::vector<ScreeningFeatures>& features,
    const std::vector<int>& labels, const LogisticOptions& options = {});

// Exponentially weighted empirical CDF over the most recent `capacity`
// calibrated scores. The newest score has weight 1 and each older one is
// discounted by another factor of gamma.
class ScoreCdf {
 public:
  explicit ScoreCdf(double gamma = 0.99, std::size_t capacity = 512);

  void Update(double score);
  // Weighted fraction of stored scores <= threshold; 0.5 when empty.
  double Eval(double threshold) const;

  bool empty() const { return scores_.empty(); }
  std::size_t size() const { return scores_.size(); }
  double gamma() const { return gamma_; }
  std::size_t capacity() const { return capacity_; }
  // Oldest first.
  std::vector<double> scores() const { return {scores_.begin(), scores_.end()}; }

 private:
  double gamma_;
  std::size_t capacity_;
  std::deque<double> scores_;
  std::vector<double> powers_;  // gamma^k
};

}  // namespace pvroute

#endif  // PVROUTE_SCREENING_H_
