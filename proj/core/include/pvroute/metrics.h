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

#ifndef PVROUTE_METRICS_H_
#define PVROUTE_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pvroute/queues.h"
#include "pvroute/trace.h"

namespace pvroute {

// Rank statistic with 0.5 credit for tied pairs. nullopt unless both classes
// are present.
std::optional<double> Auroc(std::span<const double> scores,
                            std::span<const int> labels);

// Average precision: sum over distinct score levels (descending) of
// precision * recall increment, tied scores entering together. nullopt
// without positives.
std::optional<double> Auprc(std::span<const double> scores,
                            std::span<const int> labels);

struct MetricReport {
  std::size_t evaluated = 0;  // revealed node-slot rows
  double mae = 0.0;           // capacity-normalized units
  double rmse = 0.0;
  double nmae = 0.0;  // %FS
  double nrmse = 0.0;
  std::optional<double> auroc;
  std::optional<double> auprc;
  std::optional<double> ree;  // nMAE on ramp or OOD rows
  std::optional<double> dg;   // nMAE(OOD) / nMAE(ID)
  double avg_latency = 0.0;
  double avg_comm = 0.0;
  double cloud_usage = 0.0;  // time-average realized rho
  double avg_backlog = 0.0;  // time-average Q_tau + Q_c + Q_rho
  std::array<double, 3> final_rate{};  // Q_g(T) / T
  std::array<bool, 3> bound_holds{};
  StabilityReport stability;
  // Mode-2 share in the low, middle and high within-node score terciles.
  std::array<double, 3> tercile_cloud_share{};
  std::array<double, 3> mode_share{};
  double avg_fp_residual = 0.0;
  double avg_rho_gap = 0.0;  // mean |rho - rho_star|
  std::size_t cloud_fallbacks = 0;
};

MetricReport ComputeMetrics(const SlotTrace& trace);

// Flat (name, value) view in a fixed order; undefined values become NaN.
std::vector<std::pair<std::string, double>> MetricColumns(
    const MetricReport& report);

}  // namespace pvroute

#endif  // PVROUTE_METRICS_H_
