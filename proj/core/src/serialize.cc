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

#include "pvroute/serialize.h"

#include <filesystem>
#include <fstream>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

Json FromMap(const LinearMap& m) {
  return Json{{"inputs", m.inputs},
              {"outputs", m.outputs},
              {"coef", m.coef},
              {"intercept", m.intercept}};
}

LinearMap ToMap(const Json& j) {
  LinearMap m;
  m.inputs = j.at("inputs").get<std::size_t>();
  m.outputs = j.at("outputs").get<std::size_t>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<std::vector<double>>();
  if (m.coef.size() != m.inputs * m.outputs || m.intercept.size() != m.outputs) {
    throw SchemaError("linear map: coefficient sizes do not match");
  }
  return m;
}

Json FromStep(const StepFunction& f) {
  return Json{{"breaks", f.breaks()}, {"values", f.values()}};
}

StepFunction ToStep(const Json& j) {
  return StepFunction(j.at("breaks").get<std::vector<double>>(),
                      j.at("values").get<std::vector<double>>());
}

Json FromGains(const GainCurves& g) {
  return Json{{"g1", FromStep(g.g1)}, {"g2", FromStep(g.g2)}};
}

GainCurves ToGains(const Json& j) {
  return MakeGainCurves(ToStep(j.at("g1")), ToStep(j.at("g2")));
}

template <typename Fn>
auto Guard(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  } catch (const DataError& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

void CheckVersion(const Json& doc, const char* what) {
  if (!doc.contains("version") || doc.at("version") != kArtifactVersion) {
    throw SchemaError(std::string(what) + ": unsupported artifact version");
  }
}

}  // namespace

Json ModelsToJson(const BranchModels& m) {
  Json experts = Json::array();
  for (const ExpertModel& e : m.experts) {
    experts.push_back(Json{{"node_id", e.node_id},
                           {"horizon", e.horizon},
                           {"persistence", e.persistence},
                           {"map", FromMap(e.map)}});
  }
  Json replicas = Json::array();
  for (const LinearMap& r : m.small.replicas) replicas.push_back(FromMap(r));
  return Json{
      {"version", kArtifactVersion},
      {"horizon", m.horizon},
      {"seed", m.seed},
      {"layout",
       {{"lags", m.layout.lags},
        {"covariates", m.layout.covariates},
        {"harmonics", m.layout.harmonics}}},
      {"experts", experts},
      {"small",
       {{"horizon", m.small.horizon},
        {"persistence", m.small.persistence},
        {"replicas", replicas}}},
      {"encoder",
       {{"lags", m.encoder.lags},
        {"query_lags", m.encoder.query_lags},
        {"covariates", m.encoder.covariates},
        {"harmonics", m.encoder.harmonics},
        {"mean", m.encoder.mean},
        {"scale", m.encoder.scale}}},
      {"cloud",
       {{"horizon", m.cloud.horizon},
        {"untrained", m.cloud.untrained},
        {"map", FromMap(m.cloud.map)}}},
  };
}

BranchModels ModelsFromJson(const Json& doc) {
  CheckVersion(doc, "models");
  return Guard("models", [&] {
    BranchModels m;
    m.horizon = doc.at("horizon").get<int>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.layout.lags = doc.at("layout").at("lags").get<int>();
    m.layout.covariates = doc.at("layout").at("covariates").get<int>();
    m.layout.harmonics = doc.at("layout").at("harmonics").get<int>();
    for (const Json& e : doc.at("experts")) {
      ExpertModel x;
      x.node_id = e.at("node_id").get<std::string>();
      x.horizon = e.at("horizon").get<int>();
      x.persistence = e.at("persistence").get<bool>();
      x.map = ToMap(e.at("map"));
      m.experts.push_back(std::move(x));
    }
    const Json& s = doc.at("small");
    m.small.horizon = s.at("horizon").get<int>();
    m.small.persistence = s.at("persistence").get<bool>();
    for (const Json& r : s.at("replicas")) m.small.replicas.push_back(ToMap(r));
    const Json& enc = doc.at("encoder");
    m.encoder.lags = enc.at("lags").get<int>();
    m.encoder.query_lags = enc.at("query_lags").get<int>();
    m.encoder.covariates = enc.at("covariates").get<int>();
    m.encoder.harmonics = enc.at("harmonics").get<int>();
    m.encoder.mean = enc.at("mean").get<std::vector<double>>();
    m.encoder.scale = enc.at("scale").get<std::vector<double>>();
    const Json& c = doc.at("cloud");
    m.cloud.horizon = c.at("horizon").get<int>();
    m.cloud.untrained = c.at("untrained").get<bool>();
    m.cloud.map = ToMap(c.at("map"));
    return m;
  });
}

Json BundleToJson(const Bundle& b) {
  Json per_node = Json::array();
  for (const GainCurves& g : b.gains.per_node) per_node.push_back(FromGains(g));
  std::vector<int> specific(b.gains.node_specific.begin(),
                            b.gains.node_specific.end());
  const ExecutedModeCalibrator& cal = b.calibrator;
  Json cells = Json::array();
  for (int n = 0; n < cal.nodes(); ++n) {
    for (Mode mode : kAllModes) {
      for (int k = 0; k < cal.bins(); ++k) {
        if (cal.count(n, mode, k) == 0) continue;
        cells.push_back(Json::array(
            {n, ModeIndex(mode), k, cal.mean(n, mode, k), cal.count(n, mode, k)}));
      }
    }
  }
  const ScreeningWeights& w = b.screening;
  return Json{
      {"version", kArtifactVersion},
      {"horizon", b.horizon},
      {"lags", b.lags},
      {"node_ids", b.node_ids},
      {"screening",
       {{"beta", w.beta},
        {"bias", w.bias},
        {"alpha", w.alpha},
        {"feature_mean", w.feature_mean},
        {"feature_scale", w.feature_scale},
        {"degenerate", w.degenerate},
        {"log_features", w.log_features}}},
      {"ood",
       {{"mean", b.ood.mean()},
        {"covariance", b.ood.covariance()},
        {"jitter", b.ood.jitter()}}},
      {"mutation", {{"covariate_std", b.mutation.covariate_std}}},
      {"gains",
       {{"pooled", FromGains(b.gains.pooled)},
        {"per_node", per_node},
        {"node_specific", specific}}},
      {"calibrator",
       {{"nodes", cal.nodes()},
        {"bins", cal.bins()},
        {"s_max", cal.s_max()},
        {"cells", cells}}},
      {"cdf_seeds", b.cdf_seeds},
      {"str_threshold", b.str_threshold},
      {"ramp_threshold", b.ramp_threshold},
      {"ood_threshold", b.ood_threshold},
      {"prior1", b.prior1},
      {"prior2", b.prior2},
      {"replay_auroc", b.replay_auroc ? Json(*b.replay_auroc) : Json(nullptr)},
      {"replay_size", b.replay_size},
      {"screening_degenerate", b.screening_degenerate},
  };
}

Bundle BundleFromJson(const Json& doc) {
  CheckVersion(doc, "bundle");
  return Guard("bundle", [&] {
    Bundle b;
    b.horizon = doc.at("horizon").get<int>();
    b.lags = doc.at("lags").get<int>();
    b.node_ids = doc.at("node_ids").get<std::vector<std::string>>();
    const Json& w = doc.at("screening");
    b.screening.beta = w.at("beta").get<std::array<double, 4>>();
    b.screening.bias = w.at("bias").get<double>();
    b.screening.alpha = w.at("alpha").get<double>();
    b.screening.feature_mean = w.at("feature_mean").get<std::array<double, 4>>();
    b.screening.feature_scale = w.at("feature_scale").get<std::array<double, 4>>();
    b.screening.degenerate = w.at("degenerate").get<bool>();
    b.screening.log_features = w.at("log_features").get<bool>();
    b.screening.Validate();
    const Json& o = doc.at("ood");
    b.ood = OodReference(o.at("mean").get<std::vector<double>>(),
                         o.at("covariance").get<std::vector<double>>(),
                         o.at("jitter").get<double>());
    b.mutation.covariate_std =
        doc.at("mutation").at("covariate_std").get<std::vector<double>>();
    const Json& g = doc.at("gains");
    b.gains.pooled = ToGains(g.at("pooled"));
    for (const Json& c : g.at("per_node")) b.gains.per_node.push_back(ToGains(c));
    for (int v : g.at("node_specific").get<std::vector<int>>()) {
      b.gains.node_specific.push_back(v != 0);
    }
    const Json& c = doc.at("calibrator");
    b.calibrator = ExecutedModeCalibrator(c.at("nodes").get<int>(),
                                          c.at("bins").get<int>(),
                                          c.at("s_max").get<double>());
    for (const Json& cell : c.at("cells")) {
      b.calibrator.Set(cell.at(0).get<int>(), ModeFromIndex(cell.at(1).get<int>()),
                       cell.at(2).get<int>(), cell.at(3).get<double>(),
                       cell.at(4).get<std::int64_t>());
    }
    b.cdf_seeds = doc.at("cdf_seeds").get<std::vector<std::vector<double>>>();
    b.str_threshold = doc.at("str_threshold").get<double>();
    b.ramp_threshold = doc.at("ramp_threshold").get<double>();
    b.ood_threshold = doc.at("ood_threshold").get<double>();
    b.prior1 = doc.at("prior1").get<std::vector<double>>();
    b.prior2 = doc.at("prior2").get<std::vector<double>>();
    if (!doc.at("replay_auroc").is_null()) {
      b.replay_auroc = doc.at("replay_auroc").get<double>();
    }
    b.replay_size = doc.at("replay_size").get<std::size_t>();
    b.screening_degenerate = doc.at("screening_degenerate").get<bool>();
    return b;
  });
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const Json& doc) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

void SaveArtifacts(const std::string& dir, const BranchModels& models,
                   const Bundle& bundle) {
  WriteJsonFile(dir + "/models.json", ModelsToJson(models));
  WriteJsonFile(dir + "/bundle.json", BundleToJson(bundle));
}

bool ArtifactsExist(const std::string& dir) {
  return std::filesystem::exists(dir + "/models.json") &&
         std::filesystem::exists(dir + "/bundle.json");
}

void LoadArtifacts(const std::string& dir, BranchModels& models,
                   Bundle& bundle) {
  models = ModelsFromJson(ReadJsonFile(dir + "/models.json"));
  bundle = BundleFromJson(ReadJsonFile(dir + "/bundle.json"));
}

}  // namespace pvroute
