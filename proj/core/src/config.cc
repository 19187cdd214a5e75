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

#include "pvroute/config.h"

#include <cmath>
#include <fstream>
#include <set>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

// Objects whose keys are node ids rather than schema fields.
const std::set<std::string>& FreeFormPaths() {
  static const std::set<std::string> paths = {"controller.kappa_per_node",
                                              "controller.latency_per_node"};
  return paths;
}

bool Compatible(const Json& base, const Json& value) {
  if (base.is_null()) return true;
  if (base.is_number()) return value.is_number();
  if (base.is_boolean()) return value.is_boolean();
  if (base.is_string()) return value.is_string();
  if (base.is_array()) return value.is_array();
  if (base.is_object()) return value.is_object();
  return false;
}

void MergeStrict(Json& base, const Json& overrides, const std::string& path) {
  if (!overrides.is_object()) {
    throw ConfigError("config" + (path.empty() ? "" : " '" + path + "'") +
                      " must be a JSON object");
  }
  for (const auto& [key, value] : overrides.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + here + "'");
    Json& slot = base[key];
    if (!Compatible(slot, value)) {
      throw ConfigError("config key '" + here + "' has the wrong type");
    }
    if (slot.is_object() && !FreeFormPaths().contains(here)) {
      MergeStrict(slot, value, here);
    } else {
      slot = value;
    }
  }
}

Json LatencyToJson(const NodeLatency& n) {
  return Json{{"tau_e", n.tau_e},
              {"tau_s", n.tau_s},
              {"tau_f", n.tau_f},
              {"tau_up", n.tau_up},
              {"tau_down", n.tau_down}};
}

NodeLatency LatencyFromJson(const Json& j, const NodeLatency& defaults,
                            const std::string& path) {
  NodeLatency n = defaults;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError(path + "." + key + " must be a number");
    const double v = value.get<double>();
    if (key == "tau_e") n.tau_e = v;
    else if (key == "tau_s") n.tau_s = v;
    else if (key == "tau_f") n.tau_f = v;
    else if (key == "tau_up") n.tau_up = v;
    else if (key == "tau_down") n.tau_down = v;
    else throw ConfigError("unknown config key '" + path + "." + key + "'");
  }
  return n;
}

template <typename T>
T Get(const Json& j, const char* key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + path + "." + key + "' is invalid");
  }
}

template <typename T>
std::optional<T> GetOptional(const Json& j, const char* key,
                             const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return Get<T>(j, key, path);
}

RunConfig FromJson(const Json& doc) {
  RunConfig c;
  const Json& d = doc.at("data");
  c.data.source = Get<std::string>(d, "source", "data");
  const Json& syn = d.at("synthetic");
  auto& s = c.data.synthetic;
  s.nodes = Get<int>(syn, "nodes", "data.synthetic");
  s.slots = Get<int>(syn, "slots", "data.synthetic");
  s.slots_per_day = Get<int>(syn, "slots_per_day", "data.synthetic");
  s.start = Get<std::int64_t>(syn, "start", "data.synthetic");
  s.hazard = Get<double>(syn, "hazard", "data.synthetic");
  const auto rows =
      Get<std::vector<std::vector<double>>>(syn, "transition", "data.synthetic");
  if (rows.size() != 3) throw ConfigError("data.synthetic.transition must be 3x3");
  for (int r = 0; r < 3; ++r) {
    if (rows[r].size() != 3) {
      throw ConfigError("data.synthetic.transition must be 3x3");
    }
    for (int k = 0; k < 3; ++k) s.transition[r][k] = rows[r][k];
  }
  s.initial_regime = Get<int>(syn, "initial_regime", "data.synthetic");
  s.ramp_magnitude = Get<double>(syn, "ramp_magnitude", "data.synthetic");
  s.noise = Get<double>(syn, "noise", "data.synthetic");
  s.capacity_min = Get<double>(syn, "capacity_min", "data.synthetic");
  s.capacity_max = Get<double>(syn, "capacity_max", "data.synthetic");
  s.weather_lead = Get<int>(syn, "weather_lead", "data.synthetic");
  c.data.paths = Get<std::vector<std::string>>(d, "paths", "data");
  c.data.capacity_path = Get<std::string>(d, "capacity_path", "data");
  c.data.skip_night = Get<bool>(d, "skip_night", "data");
  const Json& schema = d.at("schema");
  c.data.schema.timestamp = Get<std::string>(schema, "timestamp", "data.schema");
  c.data.schema.node = Get<std::string>(schema, "node", "data.schema");
  c.data.schema.power = Get<std::string>(schema, "power", "data.schema");
  const Json& split = d.at("split");
  c.data.split.train = Get<double>(split, "train", "data.split");
  c.data.split.val = Get<double>(split, "val", "data.split");
  c.data.split.test = Get<double>(split, "test", "data.split");

  const Json& m = doc.at("model");
  c.model.lags = Get<int>(m, "lags", "model");
  c.model.horizon = Get<int>(m, "horizon", "model");
  c.model.lambda_ridge = Get<double>(m, "lambda_ridge", "model");
  c.model.replicas = Get<int>(m, "replicas", "model");
  c.model.k = Get<int>(m, "k", "model");
  c.model.temperature = Get<double>(m, "temperature", "model");
  c.model.query_lags = Get<int>(m, "query_lags", "model");
  c.model.cloud_stride = Get<int>(m, "cloud_stride", "model");
  c.model.harmonics = Get<int>(m, "harmonics", "model");
  c.model.scarce_nodes = Get<int>(m, "scarce_nodes", "model");
  c.model.scarce_fraction = Get<double>(m, "scarce_fraction", "model");

  const Json& sc = doc.at("screening");
  c.screening.gamma = Get<double>(sc, "gamma", "screening");
  c.screening.w_cdf = Get<int>(sc, "w_cdf", "screening");
  c.screening.w_mu = Get<int>(sc, "w_mu", "screening");
  c.screening.alpha = Get<double>(sc, "alpha", "screening");
  c.screening.l2 = Get<double>(sc, "l2", "screening");
  c.screening.iterations = Get<int>(sc, "iterations", "screening");
  c.screening.log_features = Get<bool>(sc, "log_features", "screening");

  const Json& cal = doc.at("calibration");
  c.calibration.bins = Get<int>(cal, "bins", "calibration");
  c.calibration.m_min = Get<int>(cal, "m_min", "calibration");
  c.calibration.per_node = Get<bool>(cal, "per_node", "calibration");

  const Json& ctl = doc.at("controller");
  c.controller.controller.V = Get<double>(ctl, "V", "controller");
  c.controller.controller.n_fp = Get<int>(ctl, "n_fp", "controller");
  c.controller.controller.damping = Get<double>(ctl, "damping", "controller");
  c.controller.tau_max = Get<double>(ctl, "tau_max", "controller");
  c.controller.c_max = GetOptional<double>(ctl, "c_max", "controller");
  c.controller.rho_max = Get<double>(ctl, "rho_max", "controller");
  c.controller.latency.fallback =
      LatencyFromJson(ctl.at("latency"), NodeLatency{}, "controller.latency");
  c.controller.latency.tau_cloud = Get<double>(ctl, "tau_cloud", "controller");
  const Json& phi = ctl.at("congestion");
  c.controller.latency.phi.kind =
      CongestionKindFromName(Get<std::string>(phi, "kind", "controller.congestion"));
  c.controller.latency.phi.d0 = Get<double>(phi, "d0", "controller.congestion");
  c.controller.latency.phi.d1 = Get<double>(phi, "d1", "controller.congestion");
  for (const auto& [node, value] : ctl.at("latency_per_node").items()) {
    if (!value.is_object()) {
      throw ConfigError("controller.latency_per_node." + node + " must be an object");
    }
    c.controller.latency_per_node[node] = LatencyFromJson(
        value, c.controller.latency.fallback, "controller.latency_per_node." + node);
  }
  c.controller.kappa = Get<double>(ctl, "kappa", "controller");
  for (const auto& [node, value] : ctl.at("kappa_per_node").items()) {
    if (!value.is_number()) {
      throw ConfigError("controller.kappa_per_node." + node + " must be a number");
    }
    c.controller.kappa_per_node[node] = value.get<double>();
  }

  const Json& f = doc.at("fusion");
  c.fusion.eta = Get<double>(f, "eta", "fusion");
  c.fusion.prior = Get<std::string>(f, "prior", "fusion");

  const Json& sim = doc.at("sim");
  c.sim.insert_revealed = Get<bool>(sim, "insert_revealed", "sim");
  c.sim.ramp_quantile = Get<double>(sim, "ramp_quantile", "sim");
  c.sim.ood_quantile = Get<double>(sim, "ood_quantile", "sim");
  c.sim.str_threshold = GetOptional<double>(sim, "str_threshold", "sim");
  c.sim.max_slots = GetOptional<int>(sim, "max_slots", "sim");

  const Json& loss = doc.at("loss");
  c.loss.kind = LossKindFromName(Get<std::string>(loss, "kind", "loss"));
  c.loss.huber_delta = Get<double>(loss, "huber_delta", "loss");
  c.loss.horizon_weights =
      GetOptional<std::vector<double>>(loss, "horizon_weights", "loss");

  c.policy = Get<std::string>(doc, "policy", "");
  c.seed = Get<std::uint64_t>(doc, "seed", "");
  c.threads = Get<int>(doc, "threads", "");
  c.output = Get<std::string>(doc, "output", "");
  c.Validate();
  return c;
}

}  // namespace

void RunConfig::Validate() const {
  if (data.source != "synthetic" && data.source != "csv") {
    throw ConfigError("data.source must be 'synthetic' or 'csv'");
  }
  if (data.source == "csv") {
    if (data.paths.empty()) throw ConfigError("data.paths is empty for csv source");
    if (data.capacity_path.empty()) {
      throw ConfigError("data.capacity_path is required for csv source");
    }
  } else {
    data.synthetic.Validate();
  }
  data.split.Validate();
  if (model.lags < 1 || model.horizon < 1) {
    throw ConfigError("model.lags and model.horizon must be >= 1");
  }
  if (!(model.lambda_ridge >= 0.0)) throw ConfigError("model.lambda_ridge < 0");
  if (model.replicas < 2) throw ConfigError("model.replicas must be >= 2");
  if (model.k < 1) throw ConfigError("model.k must be >= 1");
  if (!(model.temperature > 0.0)) throw ConfigError("model.temperature <= 0");
  if (model.query_lags < 1 || model.query_lags > model.lags) {
    throw ConfigError("model.query_lags must lie in [1, lags]");
  }
  if (model.cloud_stride < 1) throw ConfigError("model.cloud_stride < 1");
  if (model.harmonics < 1) throw ConfigError("model.harmonics < 1");
  if (model.scarce_nodes < 0) throw ConfigError("model.scarce_nodes < 0");
  if (!(model.scarce_fraction > 0.0 && model.scarce_fraction <= 1.0)) {
    throw ConfigError("model.scarce_fraction must lie in (0, 1]");
  }
  if (!(screening.gamma > 0.0 && screening.gamma <= 1.0)) {
    throw ConfigError("screening.gamma must lie in (0, 1]");
  }
  if (screening.w_cdf < 1 || screening.w_mu < 1) {
    throw ConfigError("screening.w_cdf and w_mu must be >= 1");
  }
  if (!(screening.alpha > 0.0)) throw ConfigError("screening.alpha must be > 0");
  if (!(screening.l2 >= 0.0) || screening.iterations < 1) {
    throw ConfigError("screening.l2 >= 0 and iterations >= 1 required");
  }
  if (calibration.bins < 1 || calibration.m_min < 1) {
    throw ConfigError("calibration.bins and m_min must be >= 1");
  }
  controller.controller.Validate();
  if (!(controller.tau_max > 0.0) || !(controller.rho_max > 0.0) ||
      controller.rho_max > 1.0) {
    throw ConfigError("controller budgets out of range");
  }
  if (controller.c_max && !(*controller.c_max > 0.0)) {
    throw ConfigError("controller.c_max must be > 0");
  }
  if (!(controller.kappa >= 0.0)) throw ConfigError("controller.kappa < 0");
  for (const auto& [node, k] : controller.kappa_per_node) {
    if (!(k >= 0.0)) throw ConfigError("kappa for " + node + " < 0");
  }
  controller.latency.Validate();
  for (const auto& [node, lat] : controller.latency_per_node) {
    LatencyParams p;
    p.fallback = lat;
    p.Validate();
  }
  if (!(fusion.eta > 0.0)) throw ConfigError("fusion.eta must be > 0");
  if (fusion.prior != "uniform" && fusion.prior != "inverse_loss") {
    throw ConfigError("fusion.prior must be 'uniform' or 'inverse_loss'");
  }
  if (!(sim.ramp_quantile >= 0.0 && sim.ramp_quantile <= 1.0) ||
      !(sim.ood_quantile >= 0.0 && sim.ood_quantile <= 1.0)) {
    throw ConfigError("sim quantiles must lie in [0, 1]");
  }
  if (sim.max_slots && *sim.max_slots < 1) throw ConfigError("sim.max_slots < 1");
  loss.Validate();
  static const std::set<std::string> policies = {"CAPE", "ExO", "EdO",
                                                 "CO",   "ACA", "STR"};
  if (!policies.contains(policy)) {
    throw ConfigError("policy must be one of CAPE, ExO, EdO, CO, ACA, STR");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::vector<double> RunConfig::KappaFor(
    const std::vector<std::string>& node_ids) const {
  std::vector<double> out;
  for (const auto& id : node_ids) {
    const auto it = controller.kappa_per_node.find(id);
    out.push_back(it == controller.kappa_per_node.end() ? controller.kappa
                                                        : it->second);
  }
  return out;
}

LatencyParams RunConfig::LatencyFor(
    const std::vector<std::string>& node_ids) const {
  LatencyParams p = controller.latency;
  p.nodes.clear();
  for (const auto& id : node_ids) {
    const auto it = controller.latency_per_node.find(id);
    p.nodes.push_back(it == controller.latency_per_node.end() ? p.fallback
                                                              : it->second);
  }
  return p;
}

Budgets RunConfig::BudgetsFor(const std::vector<std::string>& node_ids) const {
  Budgets b;
  b.tau_max = controller.tau_max;
  b.rho_max = controller.rho_max;
  if (controller.c_max) {
    b.c_max = *controller.c_max;
  } else {
    const auto kappa = KappaFor(node_ids);
    double mean = 0.0;
    for (double k : kappa) mean += k;
    mean = kappa.empty() ? controller.kappa : mean / static_cast<double>(kappa.size());
    b.c_max = 0.6 * mean * b.rho_max;
  }
  return b;
}

Json ConfigToJson(const RunConfig& c) {
  Json transition = Json::array();
  for (const auto& row : c.data.synthetic.transition) {
    transition.push_back(Json::array({row[0], row[1], row[2]}));
  }
  Json latency_per_node = Json::object();
  for (const auto& [node, lat] : c.controller.latency_per_node) {
    latency_per_node[node] = LatencyToJson(lat);
  }
  Json kappa_per_node = Json::object();
  for (const auto& [node, k] : c.controller.kappa_per_node) {
    kappa_per_node[node] = k;
  }
  const auto& s = c.data.synthetic;
  Json doc;
  doc["data"] = {
      {"source", c.data.source},
      {"synthetic",
       {{"nodes", s.nodes},
        {"slots", s.slots},
        {"slots_per_day", s.slots_per_day},
        {"start", s.start},
        {"hazard", s.hazard},
        {"transition", transition},
        {"initial_regime", s.initial_regime},
        {"ramp_magnitude", s.ramp_magnitude},
        {"noise", s.noise},
        {"capacity_min", s.capacity_min},
        {"capacity_max", s.capacity_max},
        {"weather_lead", s.weather_lead}}},
      {"paths", c.data.paths},
      {"capacity_path", c.data.capacity_path},
      {"skip_night", c.data.skip_night},
      {"schema",
       {{"timestamp", c.data.schema.timestamp},
        {"node", c.data.schema.node},
        {"power", c.data.schema.power}}},
      {"split",
       {{"train", c.data.split.train},
        {"val", c.data.split.val},
        {"test", c.data.split.test}}}};
  doc["model"] = {{"lags", c.model.lags},
                  {"horizon", c.model.horizon},
                  {"lambda_ridge", c.model.lambda_ridge},
                  {"replicas", c.model.replicas},
                  {"k", c.model.k},
                  {"temperature", c.model.temperature},
                  {"query_lags", c.model.query_lags},
                  {"cloud_stride", c.model.cloud_stride},
                  {"harmonics", c.model.harmonics},
                  {"scarce_nodes", c.model.scarce_nodes},
                  {"scarce_fraction", c.model.scarce_fraction}};
  doc["screening"] = {{"gamma", c.screening.gamma},
                      {"w_cdf", c.screening.w_cdf},
                      {"w_mu", c.screening.w_mu},
                      {"alpha", c.screening.alpha},
                      {"l2", c.screening.l2},
                      {"iterations", c.screening.iterations},
                      {"log_features", c.screening.log_features}};
  doc["calibration"] = {{"bins", c.calibration.bins},
                        {"m_min", c.calibration.m_min},
                        {"per_node", c.calibration.per_node}};
  const auto& phi = c.controller.latency.phi;
  doc["controller"] = {
      {"V", c.controller.controller.V},
      {"n_fp", c.controller.controller.n_fp},
      {"damping", c.controller.controller.damping},
      {"tau_max", c.controller.tau_max},
      {"c_max", c.controller.c_max ? Json(*c.controller.c_max) : Json(nullptr)},
      {"rho_max", c.controller.rho_max},
      {"latency", LatencyToJson(c.controller.latency.fallback)},
      {"latency_per_node", latency_per_node},
      {"tau_cloud", c.controller.latency.tau_cloud},
      {"congestion",
       {{"kind", std::string(CongestionKindName(phi.kind))},
        {"d0", phi.d0},
        {"d1", phi.d1}}},
      {"kappa", c.controller.kappa},
      {"kappa_per_node", kappa_per_node}};
  doc["fusion"] = {{"eta", c.fusion.eta}, {"prior", c.fusion.prior}};
  doc["sim"] = {
      {"insert_revealed", c.sim.insert_revealed},
      {"ramp_quantile", c.sim.ramp_quantile},
      {"ood_quantile", c.sim.ood_quantile},
      {"str_threshold",
       c.sim.str_threshold ? Json(*c.sim.str_threshold) : Json(nullptr)},
      {"max_slots", c.sim.max_slots ? Json(*c.sim.max_slots) : Json(nullptr)}};
  doc["loss"] = {
      {"kind", std::string(LossKindName(c.loss.kind))},
      {"huber_delta", c.loss.huber_delta},
      {"horizon_weights",
       c.loss.horizon_weights ? Json(*c.loss.horizon_weights) : Json(nullptr)}};
  doc["policy"] = c.policy;
  doc["seed"] = c.seed;
  doc["threads"] = c.threads;
  doc["output"] = c.output;
  return doc;
}

Json DefaultConfigJson() { return ConfigToJson(RunConfig{}); }

RunConfig ParseConfig(const Json& overrides) {
  Json doc = DefaultConfigJson();
  MergeStrict(doc, overrides, "");
  return FromJson(doc);
}

RunConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return ParseConfig(doc);
}

void ApplyOverride(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like section.key=value: '" +
                      assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("bad override path '" + path + "'");
    if (!node->is_object()) *node = Json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace pvroute
