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

#ifndef PVROUTE_CONFIG_H_
#define PVROUTE_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvroute/data.h"
#include "pvroute/fusion.h"
#include "pvroute/queues.h"
#include "pvroute/router.h"
#include "pvroute/synth.h"
#include "pvroute/types.h"

namespace pvroute {

using Json = nlohmann::ordered_json;

struct DataConfig {
  std::string source = "synthetic";  // "synthetic" or "csv"
  SyntheticConfig synthetic;
  std::vector<std::string> paths;
  std::string capacity_path;
  bool skip_night = true;
  CsvSchema schema;
  SplitSpec split;
};

struct ModelConfig {
  int lags = 24;     // W_lag
  int horizon = 12;  // H
  double lambda_ridge = 1e-3;
  int replicas = 5;  // B
  int k = 8;         // K
  double temperature = 1.0;
  int query_lags = 8;
  int cloud_stride = 4;
  int harmonics = 8;
  // The last `scarce_nodes` experts see only the most recent
  // `scarce_fraction` of their node's training samples.
  int scarce_nodes = 2;
  double scarce_fraction = 0.1;
};

struct ScreeningConfig {
  double gamma = 0.99;
  int w_cdf = 512;
  int w_mu = 6;
  double alpha = 1.0;
  double l2 = 1e-2;
  int iterations = 50;
  bool log_features = true;
};

struct CalibrationConfig {
  int bins = 20;   // B_bins
  int m_min = 50;  // M_min
  bool per_node = true;
};

struct ControllerSection {
  ControllerConfig controller;
  double tau_max = 120.0;
  std::optional<double> c_max;  // default 0.6 * mean(kappa) * rho_max
  double rho_max = 0.5;
  LatencyParams latency;
  std::map<std::string, NodeLatency> latency_per_node;
  double kappa = 1.0;
  std::map<std::string, double> kappa_per_node;
};

struct FusionSection {
  double eta = 0.5;
  std::string prior = "uniform";  // or "inverse_loss"
};

struct SimConfig {
  bool insert_revealed = true;
  double ramp_quantile = 0.95;
  double ood_quantile = 0.90;
  std::optional<double> str_threshold;  // tuned on validation when unset
  std::optional<int> max_slots;         // truncate the evaluation split
};

struct RunConfig {
  DataConfig data;
  ModelConfig model;
  ScreeningConfig screening;
  CalibrationConfig calibration;
  ControllerSection controller;
  FusionSection fusion;
  SimConfig sim;
  LossSpec loss;
  std::string policy = "CAPE";
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output = "out";

  // Throws ConfigError on any out-of-range value.
  void Validate() const;
  // Per-node communication volume for the given node ids.
  std::vector<double> KappaFor(const std::vector<std::string>& node_ids) const;
  LatencyParams LatencyFor(const std::vector<std::string>& node_ids) const;
  Budgets BudgetsFor(const std::vector<std::string>& node_ids) const;
};

// Fully populated default document.
Json DefaultConfigJson();

// Overlays `overrides` onto the defaults, rejecting unknown keys and type
// mismatches, then parses and validates. Throws ConfigError.
RunConfig ParseConfig(const Json& overrides);
RunConfig LoadConfigFile(const std::string& path);

// Applies `section.key=value` to `doc`. The value is parsed as JSON when
// possible and kept as a string otherwise. Throws ConfigError.
void ApplyOverride(Json& doc, const std::string& assignment);

// Resolved configuration, every default filled in.
Json ConfigToJson(const RunConfig& config);

}  // namespace pvroute

#endif  // PVROUTE_CONFIG_H_
