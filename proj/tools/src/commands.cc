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

#include "pvroute_cli/commands.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "pvroute/config.h"
#include "pvroute/errors.h"
#include "pvroute/experiment.h"
#include "pvroute/metrics.h"
#include "pvroute/serialize.h"
#include "pvroute/sim.h"
#include "pvroute/sweep.h"
#include "pvroute/synth.h"
#include "pvroute/trace.h"

namespace pvroute::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<int> threads;
  std::string out;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON run configuration");
  cmd->add_option("--set", o.sets, "Override, section.key=value (repeatable)");
  cmd->add_option("--threads", o.threads, "Worker cap")->check(CLI::PositiveNumber);
  cmd->add_option("-o,--out", o.out, "Output directory (overrides output)");
}

RunConfig Resolve(const CommonOptions& o) {
  Json doc = o.config_path.empty() ? Json::object() : ReadJsonFile(o.config_path);
  for (const std::string& s : o.sets) ApplyOverride(doc, s);
  RunConfig config = ParseConfig(doc);
  if (o.threads) config.threads = *o.threads;
  if (!o.out.empty()) config.output = o.out;
  config.Validate();
  return config;
}

void PrintMetrics(std::ostream& out, const MetricReport& m) {
  out << "nMAE " << m.nmae << " %FS, nRMSE " << m.nrmse << " %FS, cloud usage "
      << m.cloud_usage << ", avg latency " << m.avg_latency << " ms\n";
}

int Generate(const CommonOptions& o, std::ostream& out) {
  const RunConfig config = Resolve(o);
  const auto series = Synthesize(config.data.synthetic, config.seed);
  fs::create_directories(config.output);
  std::ofstream regimes(config.output + "/regimes.csv");
  if (!regimes) throw ConfigError("cannot write " + config.output + "/regimes.csv");
  regimes << "node_id,timestamp,regime\n";
  for (const RawSeries& s : series) {
    WriteSeriesCsv(config.output + "/" + s.node_id + ".csv", s, config.data.schema);
    for (std::size_t i = 0; i < s.size(); ++i) {
      regimes << s.node_id << ',' << FormatTimestamp(s.timestamps[i]) << ','
              << s.regimes[i] << '\n';
    }
  }
  WriteCapacityCsv(config.output + "/capacity.csv", series);
  const Dataset data = BuildDataset(series, config);
  out << "wrote " << series.size() << " series of " << series.front().size()
      << " rows to " << config.output << "\n"
      << "samples: train " << data.split.train.size() << ", val "
      << data.split.val.size() << ", test " << data.split.test.size() << "\n";
  return kOk;
}

int PrepareCmd(const CommonOptions& o, std::ostream& out) {
  const RunConfig config = Resolve(o);
  const Prepared p = Prepare(config);
  SaveArtifacts(config.output, p.models, p.bundle);
  out << "replay records " << p.bundle.replay_size << ", replay AUROC ";
  if (p.bundle.replay_auroc) {
    out << *p.bundle.replay_auroc;
  } else {
    out << "undefined";
  }
  out << (p.bundle.screening_degenerate ? " (single-class fit)" : "") << "\n"
      << "artifacts written to " << config.output << "\n";
  return kOk;
}

int Simulate(const CommonOptions& o, const std::string& policy_name,
             const std::string& artifacts, std::ostream& out) {
  RunConfig config = Resolve(o);
  if (!policy_name.empty()) config.policy = policy_name;
  const Policy policy = ParsePolicy(config.policy);
  Dataset data = LoadDataset(config);
  BranchModels models;
  Bundle bundle;
  if (!artifacts.empty()) {
    if (!ArtifactsExist(artifacts)) {
      throw ConfigError("no models.json/bundle.json under " + artifacts);
    }
    LoadArtifacts(artifacts, models, bundle);
  } else {
    BranchModels trained = TrainModels(data, config);
    Prepared p = PrepareWith(config, std::move(data), std::move(trained));
    data = std::move(p.data);
    models = std::move(p.models);
    bundle = std::move(p.bundle);
  }
  const Evaluation evaluation = PrepareEvaluation(data, models, bundle, config);
  const SlotTrace trace =
      RunSimulation(data, models, bundle, evaluation, config, policy);
  const MetricReport report = ComputeMetrics(trace);
  fs::create_directories(config.output);
  WriteTraceCsv(config.output + "/trace.csv", trace);
  WriteJsonFile(config.output + "/summary.json",
                RunSummary(config, policy, trace, report));
  out << PolicyName(policy) << " over " << trace.slots.size() << " slots: ";
  PrintMetrics(out, report);
  return kOk;
}

int Sweep(const CommonOptions& o, const std::string& axis,
          const std::vector<double>& values, const std::vector<std::uint64_t>& seeds,
          const std::string& policy_name, std::ostream& out) {
  RunConfig config = Resolve(o);
  if (!policy_name.empty()) config.policy = policy_name;
  SweepSpec spec;
  spec.axis = axis;
  spec.values = values;
  spec.seeds = seeds.empty() ? std::vector<std::uint64_t>{config.seed} : seeds;
  spec.policy = ParsePolicy(config.policy);
  const auto rows = RunSweep(config, spec);
  fs::create_directories(config.output);
  const std::string path = config.output + "/sweep_" + axis + ".csv";
  WriteSweepCsv(path, rows);
  out << rows.size() << " runs written to " << path << "\n";
  return kOk;
}

int Metrics(const std::vector<std::string>& traces, const std::string& out_path,
            std::ostream& out) {
  Json doc = Json::object();
  for (const std::string& path : traces) {
    doc[path] = MetricsToJson(ComputeMetrics(ReadTraceCsv(path)));
  }
  if (!out_path.empty()) {
    WriteJsonFile(out_path, doc);
  } else {
    out << doc.dump(2) << "\n";
  }
  return kOk;
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Score-driven edge/cloud routing for PV forecasting"};
  app.require_subcommand(1);

  CommonOptions common;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  AddCommon(generate, common);

  CLI::App* prepare = app.add_subcommand("prepare", "Train branches and fit the bundle");
  AddCommon(prepare, common);

  std::string policy, artifacts;
  CLI::App* simulate = app.add_subcommand("simulate", "Run the slot loop on the test split");
  AddCommon(simulate, common);
  simulate->add_option("-p,--policy", policy, "CAPE, ExO, EdO, CO, ACA, STR[:threshold]");
  simulate->add_option("-a,--artifacts", artifacts,
                       "Directory with models.json and bundle.json");

  std::string axis;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter");
  AddCommon(sweep, common);
  sweep->add_option("--axis", axis, "V, K, rho_max, tau_max or N")->required();
  sweep->add_option("--values", values, "Axis values")->required()->delimiter(',');
  sweep->add_option("--seeds", seeds, "Seeds (default: config seed)")->delimiter(',');
  sweep->add_option("-p,--policy", policy, "Policy for every run");

  std::vector<std::string> traces;
  std::string metrics_out;
  CLI::App* metrics = app.add_subcommand("metrics", "Recompute metrics from traces");
  metrics->add_option("traces", traces, "Trace CSV files")->required();
  metrics->add_option("-o,--out", metrics_out, "Write the JSON report here");

  // CLI11 consumes a reversed argument vector.
  std::vector<std::string> rest;
  if (args.size() > 1) rest.assign(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*generate) return Generate(common, out);
    if (*prepare) return PrepareCmd(common, out);
    if (*simulate) return Simulate(common, policy, artifacts, out);
    if (*sweep) return Sweep(common, axis, values, seeds, policy, out);
    if (*metrics) return Metrics(traces, metrics_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kRuntimeError;
}

}  // namespace pvroute::cli
