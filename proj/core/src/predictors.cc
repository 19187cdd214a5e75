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

#include "pvroute/predictors.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

HorizonVector Persistence(const ObservationWindow& window, int horizon) {
  return HorizonVector::Constant(static_cast<std::size_t>(horizon),
                                 window.last_power);
}

void CollectXY(const std::vector<Sample>& samples,
               std::vector<std::vector<double>>& x,
               std::vector<std::vector<double>>& y) {
  x.reserve(samples.size());
  y.reserve(samples.size());
  for (const Sample& s : samples) {
    x.push_back(s.window.features);
    y.emplace_back(s.target.begin(), s.target.end());
  }
}

}  // namespace

HorizonVector ExpertModel::Predict(const ObservationWindow& window) const {
  if (persistence) return Persistence(window, horizon);
  return HorizonVector(map.Apply(window.features));
}

std::vector<HorizonVector> SmallModel::PredictReplicas(
    const ObservationWindow& window) const {
  std::vector<HorizonVector> out;
  if (persistence) {
    out.assign(std::max<std::size_t>(replicas.size(), 2),
               Persistence(window, horizon));
    return out;
  }
  out.reserve(replicas.size());
  for (const LinearMap& r : replicas) {
    out.emplace_back(r.Apply(window.features));
  }
  return out;
}

HorizonVector SmallModel::Predict(const ObservationWindow& window) const {
  if (persistence) return Persistence(window, horizon);
  std::vector<double> mean(static_cast<std::size_t>(horizon), 0.0);
  for (const HorizonVector& p : PredictReplicas(window)) {
    for (std::size_t h = 0; h < mean.size(); ++h) mean[h] += p[h];
  }
  for (double& m : mean) m /= static_cast<double>(replicas.size());
  return HorizonVector(std::move(mean));
}

ExpertModel TrainExpert(const std::vector<Sample>& node_train,
                        const std::string& node_id, int horizon,
                        const RidgeOptions& options) {
  ExpertModel model;
  model.node_id = node_id;
  model.horizon = horizon;
  if (node_train.empty()) {
    model.persistence = true;
    return model;
  }
  std::vector<std::vector<double>> x, y;
  CollectXY(node_train, x, y);
  model.map = FitRidge(x, y, options.lambda);
  return model;
}

SmallModel TrainSmall(const std::vector<Sample>& pooled_train, int horizon,
                      int replicas, std::uint64_t seed,
                      const RidgeOptions& options) {
  if (replicas < 2) throw ConfigError("small model needs at least 2 replicas");
  SmallModel model;
  model.horizon = horizon;
  if (pooled_train.empty()) {
    model.persistence = true;
    return model;
  }
  std::vector<std::vector<double>> x, y;
  CollectXY(pooled_train, x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> rows(n);
  for (int b = 0; b < replicas; ++b) {
    std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ULL +
                        static_cast<std::uint64_t>(b) + 1ULL);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t& r : rows) r = pick(rng);
    model.replicas.push_back(FitRidge(x, y, options.lambda, rows));
  }
  return model;
}

std::vector<double> QueryEncoder::Encode(
    const ObservationWindow& window) const {
  const std::size_t expected =
      static_cast<std::size_t>(lags + covariates + 2 * harmonics);
  if (window.features.size() != expected) {
    throw DimensionError("query: feature length mismatch");
  }
  std::vector<double> key;
  key.reserve(dim());
  const int first = lags - query_lags;
  for (int j = 0; j < query_lags; ++j) {
    const std::size_t k = key.size();
    key.push_back((window.features[first + j] - mean[k]) / scale[k]);
  }
  for (int c = 0; c < covariates; ++c) {
    const std::size_t k = key.size();
    key.push_back((window.features[lags + c] - mean[k]) / scale[k]);
  }
  key.push_back(window.features[lags + covariates]);
  key.push_back(window.features[lags + covariates + 1]);
  return key;
}

QueryEncoder FitQueryEncoder(const std::vector<Sample>& train,
                             const FeatureLayout& layout, int query_lags) {
  if (query_lags < 1 || query_lags > layout.lags) {
    throw ConfigError("query_lags must lie in [1, lags]");
  }
  QueryEncoder enc;
  enc.lags = layout.lags;
  enc.query_lags = query_lags;
  enc.covariates = layout.covariates;
  enc.harmonics = layout.harmonics;
  const std::size_t d = static_cast<std::size_t>(query_lags + layout.covariates);
  enc.mean.assign(d, 0.0);
  enc.scale.assign(d, 1.0);
  if (train.empty()) return enc;

  auto column = [&](const Sample& s, std::size_t k) {
    const int idx = k < static_cast<std::size_t>(query_lags)
                        ? layout.lags - query_lags + static_cast<int>(k)
                        : layout.lags + static_cast<int>(k) - query_lags;
    return s.window.features[idx];
  };
  const double n = static_cast<double>(train.size());
  for (std::size_t k = 0; k < d; ++k) {
    double sum = 0.0;
    for (const Sample& s : train) sum += column(s, k);
    const double m = sum / n;
    double ss = 0.0;
    for (const Sample& s : train) {
      const double dv = column(s, k) - m;
      ss += dv * dv;
    }
    const double sd = std::sqrt(ss / n);
    enc.mean[k] = m;
    enc.scale[k] = sd > 1e-12 ? sd : 1.0;
  }
  return enc;
}

SupportSet RetrieveSupport(const CaseBase& base, std::span<const double> query,
                           int k, std::int64_t current_slot) {
  if (k < 1) throw ConfigError("retrieval needs K >= 1");
  SupportSet out;
  for (const Neighbor& nb :
       base.Nearest(query, static_cast<std::size_t>(k), current_slot)) {
    const Case& c = base.at(nb.index);
    out.push_back(SupportEntry{c.key, c.trajectory, nb.distance, c.end_slot});
  }
  return out;
}

CloudContext BuildContext(const SupportSet& support, double temperature) {
  if (support.empty()) throw DataError("context: empty support set");
  if (!(temperature > 0.0)) throw ConfigError("context: temperature <= 0");
  const std::size_t H = support.front().trajectory.size();
  double d_min = support.front().distance;
  for (const SupportEntry& e : support) d_min = std::min(d_min, e.distance);
  std::vector<double> w(support.size());
  double total = 0.0;
  for (std::size_t j = 0; j < support.size(); ++j) {
    w[j] = std::exp(-(support[j].distance - d_min) / temperature);
    total += w[j];
  }
  CloudContext ctx;
  ctx.context.assign(H, 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    w[j] /= total;
    if (support[j].trajectory.size() != H) {
      throw DimensionError("context: trajectory lengths differ");
    }
    for (std::size_t h = 0; h < H; ++h) {
      ctx.context[h] += w[j] * support[j].trajectory[h];
    }
  }
  double dispersion = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    ctx.context[h] = std::clamp(ctx.context[h], 0.0, 1.0);
    double var = 0.0;
    for (std::size_t j = 0; j < support.size(); ++j) {
      const double dv = support[j].trajectory[h] - ctx.context[h];
      var += w[j] * dv * dv;
    }
    dispersion += std::sqrt(var);
  }
  ctx.dispersion = H > 0 ? dispersion / static_cast<double>(H) : 0.0;
  return ctx;
}

std::vector<double> CloudInput(const ObservationWindow& window,
                               const CloudContext& context) {
  std::vector<double> x(window.features);
  x.insert(x.end(), context.context.begin(), context.context.end());
  x.push_back(context.dispersion);
  return x;
}

HorizonVector ConditionalRegressor::Predict(const ObservationWindow& window,
                                            const CloudContext& context) const {
  if (untrained) return HorizonVector(context.context);
  return HorizonVector(map.Apply(CloudInput(window, context)));
}

ConditionalRegressor TrainCloudRegressor(const std::vector<Sample>& train,
                                         const QueryEncoder& encoder,
                                         const CaseBase& base,
                                         const CloudTrainOptions& options) {
  if (options.stride < 1) throw ConfigError("cloud stride must be >= 1");
  ConditionalRegressor reg;
  reg.horizon = train.empty() ? 0 : static_cast<int>(train.front().target.size());
  std::vector<std::vector<double>> x, y;
  for (std::size_t i = 0; i < train.size();
       i += static_cast<std::size_t>(options.stride)) {
    const Sample& s = train[i];
    const SupportSet support = RetrieveSupport(
        base, encoder.Encode(s.window), options.k, s.window.slot);
    if (support.empty()) continue;
    x.push_back(CloudInput(s.window, BuildContext(support, options.temperature)));
    y.emplace_back(s.target.begin(), s.target.end());
  }
  if (x.empty()) {
    reg.untrained = true;
    return reg;
  }
  reg.map = FitRidge(x, y, options.lambda);
  return reg;
}

CloudOutput BranchModels::PredictCloud(
    const CaseBase& base, const ObservationWindow& window, int k,
    double temperature, const HorizonVector& small_prediction) const {
  CloudOutput out;
  const SupportSet support =
      RetrieveSupport(base, encoder.Encode(window), k, window.slot);
  out.support_size = support.size();
  if (support.empty()) {
    out.prediction = small_prediction;
    out.fallback = true;
    return out;
  }
  out.prediction = cloud.Predict(window, BuildContext(support, temperature));
  return out;
}

}  // namespace pvroute
