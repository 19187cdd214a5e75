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

#include "pvroute/sweep.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "pvroute/errors.h"
#include "pvroute/experiment.h"

namespace pvroute {
namespace {

bool ChangesPrepare(const std::string& axis) { return axis == "K" || axis == "N"; }

int AsCount(const std::string& axis, double value) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw ConfigError("sweep: " + axis + " needs positive integers");
  }
  return static_cast<int>(value);
}

double MeanRevealedLoss(const SlotTrace& trace) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const NodeSlotRecord& r : trace.rows) {
    if (!r.revealed) continue;
    sum += r.loss;
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunConfig WithAxisValue(const RunConfig& config, const std::string& axis,
                        double value) {
  RunConfig c = config;
  if (axis == "V") {
    c.controller.controller.V = value;
  } else if (axis == "K") {
    c.model.k = AsCount(axis, value);
  } else if (axis == "rho_max") {
    c.controller.rho_max = value;
  } else if (axis == "tau_max") {
    c.controller.tau_max = value;
  } else if (axis == "N") {
    if (c.data.source != "synthetic") {
      throw ConfigError("sweep: the N axis needs the synthetic source");
    }
    c.data.synthetic.nodes = AsCount(axis, value);
  } else {
    throw ConfigError("sweep: unknown axis '" + axis + "'");
  }
  c.Validate();
  return c;
}

std::vector<SweepRow> RunSweep(const RunConfig& config, const SweepSpec& spec) {
  if (spec.values.empty() || spec.seeds.empty()) {
    throw ConfigError("sweep: needs at least one value and one seed");
  }
  for (double v : spec.values) WithAxisValue(config, spec.axis, v);
  std::vector<SweepRow> rows;
  rows.reserve(spec.values.size() * spec.seeds.size());
  for (double value : spec.values) {
    for (std::uint64_t seed : spec.seeds) rows.push_back({spec.axis, value, seed, {}, 0.0});
  }
  const bool shared = !ChangesPrepare(spec.axis);
  for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
    RunConfig seeded = config;
    seeded.seed = spec.seeds[s];
    std::unique_ptr<Prepared> prepared;
    std::unique_ptr<Evaluation> evaluation;
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
      const RunConfig run = WithAxisValue(seeded, spec.axis, spec.values[v]);
      if (!shared || !prepared) {
        prepared = std::make_unique<Prepared>(Prepare(run));
        evaluation = std::make_unique<Evaluation>(PrepareEvaluation(*prepared, run));
      }
      Bundle bundle = prepared->bundle;
      if (shared && !run.sim.str_threshold) {
        // Budgets may have moved; STR is tuned against the run's budgets.
        const auto& ids = prepared->data.node_ids;
        bundle.str_threshold =
            TuneStrThreshold(prepared->val_replay, run.BudgetsFor(ids),
                             run.LatencyFor(ids), run.KappaFor(ids));
      }
      const SlotTrace trace = RunSimulation(prepared->data, prepared->models,
                                            bundle, *evaluation, run, spec.policy);
      SweepRow& row = rows[v * spec.seeds.size() + s];
      row.metrics = ComputeMetrics(trace);
      row.avg_loss = MeanRevealedLoss(trace);
    }
  }
  return rows;
}

void WriteSweepCsv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "axis,value,seed";
  for (const auto& [name, _] : MetricColumns(MetricReport{})) out << ',' << name;
  out << ",avg_loss\n";
  for (const SweepRow& r : rows) {
    out << r.axis << ',' << Num(r.value) << ',' << r.seed;
    for (const auto& [_, value] : MetricColumns(r.metrics)) out << ',' << Num(value);
    out << ',' << Num(r.avg_loss) << '\n';
  }
}

}  // namespace pvroute
