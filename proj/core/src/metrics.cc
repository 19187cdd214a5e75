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

#include "pvroute/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

void CheckSizes(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("metric: scores and labels differ in length");
  }
}

std::vector<std::size_t> OrderBy(std::span<const double> scores,
                                 bool descending) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return order;
}

}  // namespace

std::optional<double> Auroc(std::span<const double> scores,
                            std::span<const int> labels) {
  CheckSizes(scores, labels);
  const auto order = OrderBy(scores, false);
  double pos = 0.0, neg = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share the midrank.
    const double midrank = 0.5 * (static_cast<double>(i + 1 + j));
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        pos += 1.0;
        rank_sum += midrank;
      } else {
        neg += 1.0;
      }
    }
    i = j;
  }
  if (pos == 0.0 || neg == 0.0) return std::nullopt;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

std::optional<double> Auprc(std::span<const double> scores,
                            std::span<const int> labels) {
  CheckSizes(scores, labels);
  double total_pos = 0.0;
  for (int y : labels) total_pos += y != 0 ? 1.0 : 0.0;
  if (total_pos == 0.0) return std::nullopt;
  const auto order = OrderBy(scores, true);
  double tp = 0.0, fp = 0.0, ap = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double group_pos = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] != 0) {
        group_pos += 1.0;
      } else {
        fp += 1.0;
      }
      ++j;
    }
    tp += group_pos;
    if (group_pos > 0.0) ap += (tp / (tp + fp)) * (group_pos / total_pos);
    i = j;
  }
  return ap;
}

MetricReport ComputeMetrics(const SlotTrace& trace) {
  MetricReport m;
  double abs_sum = 0.0, sq_sum = 0.0;
  double hard_sum = 0.0, ood_sum = 0.0, id_sum = 0.0;
  std::size_t hard_n = 0, ood_n = 0, id_n = 0;
  std::vector<double> scores;
  std::vector<int> labels;
  std::array<double, 3> modes{};
  for (const NodeSlotRecord& r : trace.rows) {
    modes[ModeIndex(r.mode)] += 1.0;
    m.avg_latency += r.latency;
    m.avg_comm += r.comm;
    if (r.cloud_fallback) ++m.cloud_fallbacks;
    if (!r.revealed) continue;
    ++m.evaluated;
    abs_sum += r.abs_err;
    sq_sum += r.sq_err;
    if (r.ramp || r.ood) {
      hard_sum += r.abs_err;
      ++hard_n;
    }
    if (r.ood) {
      ood_sum += r.abs_err;
      ++ood_n;
    } else {
      id_sum += r.abs_err;
      ++id_n;
    }
    scores.push_back(r.score);
    labels.push_back(r.oracle_label);
  }
  const double rows = static_cast<double>(trace.rows.size());
  if (!trace.rows.empty()) {
    m.avg_latency /= rows;
    m.avg_comm /= rows;
    for (int k = 0; k < 3; ++k) m.mode_share[k] = modes[k] / rows;
  }
  if (m.evaluated > 0) {
    const double n = static_cast<double>(m.evaluated);
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);
    m.nmae = 100.0 * m.mae;
    m.nrmse = 100.0 * m.rmse;
    m.auroc = Auroc(scores, labels);
    m.auprc = Auprc(scores, labels);
  }
  if (hard_n > 0) m.ree = 100.0 * hard_sum / static_cast<double>(hard_n);
  if (ood_n > 0 && id_n > 0 && id_sum > 0.0) {
    m.dg = (ood_sum / static_cast<double>(ood_n)) /
           (id_sum / static_cast<double>(id_n));
  }

  // Mode-2 share by routing-score tercile. Terciles are taken within each
  // node because thresholds and gains are node-specific; counts are pooled.
  if (!trace.rows.empty()) {
    std::map<int, std::vector<std::size_t>> by_node;
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
      by_node[trace.rows[i].node].push_back(i);
    }
    std::array<double, 3> cloud{}, total{};
    for (auto& [node, idx] : by_node) {
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return trace.rows[a].score < trace.rows[b].score;
      });
      const std::size_t n = idx.size();
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t t = 3 * k / n;
        total[t] += 1.0;
        cloud[t] += trace.rows[idx[k]].mode == Mode::kCloudAssisted ? 1.0 : 0.0;
      }
    }
    for (int t = 0; t < 3; ++t) {
      m.tercile_cloud_share[t] = total[t] > 0.0 ? cloud[t] / total[t] : 0.0;
    }
  }

  std::vector<QueueState> states;
  std::vector<Arrivals> arrivals;
  for (const SlotRecord& s : trace.slots) {
    states.push_back(s.queues);
    arrivals.push_back(s.arrivals);
    m.cloud_usage += s.rho;
    m.avg_fp_residual += s.fp_residual;
    m.avg_rho_gap += std::abs(s.rho - s.rho_star);
  }
  if (!trace.slots.empty()) {
    const double T = static_cast<double>(trace.slots.size());
    m.cloud_usage /= T;
    m.avg_fp_residual /= T;
    m.avg_rho_gap /= T;
  }
  m.stability = ComputeStability(states, arrivals, trace.budgets);
  m.avg_backlog = m.stability.avg_total_backlog;
  m.final_rate = m.stability.final_rate;
  m.bound_holds = m.stability.bound_holds;
  return m;
}

std::vector<std::pair<std::string, double>> MetricColumns(
    const MetricReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto opt = [nan](const std::optional<double>& v) { return v ? *v : nan; };
  return {
      {"nmae", r.nmae},
      {"nrmse", r.nrmse},
      {"mae", r.mae},
      {"rmse", r.rmse},
      {"auroc", opt(r.auroc)},
      {"auprc", opt(r.auprc)},
      {"ree", opt(r.ree)},
      {"dg", opt(r.dg)},
      {"avg_latency", r.avg_latency},
      {"avg_comm", r.avg_comm},
      {"cloud_usage", r.cloud_usage},
      {"avg_backlog", r.avg_backlog},
      {"q_tau_rate", r.final_rate[0]},
      {"q_c_rate", r.final_rate[1]},
      {"q_rho_rate", r.final_rate[2]},
      {"mode0_share", r.mode_share[0]},
      {"mode1_share", r.mode_share[1]},
      {"mode2_share", r.mode_share[2]},
      {"cloud_share_t1", r.tercile_cloud_share[0]},
      {"cloud_share_t2", r.tercile_cloud_share[1]},
      {"cloud_share_t3", r.tercile_cloud_share[2]},
      {"avg_fp_residual", r.avg_fp_residual},
      {"evaluated", static_cast<double>(r.evaluated)},
  };
}

}  // namespace pvroute
