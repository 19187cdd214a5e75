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

#include <gtest/gtest.h>

#include <filesystem>

#include "pvroute/errors.h"
#include "pvroute/experiment.h"
#include "pvroute/metrics.h"
#include "pvroute/serialize.h"
#include "pvroute/sim.h"
#include "pvroute/sweep.h"
#include "pvroute/trace.h"

namespace pvroute {
namespace {

RunConfig SmallConfig() {
  Json doc = Json::object();
  ApplyOverride(doc, "data.synthetic.nodes=3");
  ApplyOverride(doc, "data.synthetic.slots=2400");
  ApplyOverride(doc, "model.scarce_nodes=1");
  ApplyOverride(doc, "sim.max_slots=150");
  ApplyOverride(doc, "seed=4");
  return ParseConfig(doc);
}

class SimTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new RunConfig(SmallConfig());
    prepared_ = new Prepared(Prepare(*config_));
    evaluation_ = new Evaluation(PrepareEvaluation(*prepared_, *config_));
  }
  static void TearDownTestSuite() {
    delete evaluation_;
    delete prepared_;
    delete config_;
  }
  static SlotTrace Run(const std::string& policy) {
    return RunSimulation(*prepared_, *evaluation_, *config_, ParsePolicy(policy));
  }

  static RunConfig* config_;
  static Prepared* prepared_;
  static Evaluation* evaluation_;
};

RunConfig* SimTest::config_ = nullptr;
Prepared* SimTest::prepared_ = nullptr;
Evaluation* SimTest::evaluation_ = nullptr;

TEST(ParsePolicy, NamesAndThresholds) {
  EXPECT_EQ(ParsePolicy("cape").kind, PolicyKind::kCape);
  EXPECT_EQ(ParsePolicy("EdO").kind, PolicyKind::kEdo);
  const Policy s = ParsePolicy("STR:0.4");
  EXPECT_EQ(s.kind, PolicyKind::kStr);
  EXPECT_EQ(*s.threshold, 0.4);
  EXPECT_EQ(PolicyName(s), "STR:0.4");
  EXPECT_EQ(PolicyName(ParsePolicy("str")), "STR");
  EXPECT_THROW(ParsePolicy("STR:x"), ConfigError);
  EXPECT_THROW(ParsePolicy("random"), ConfigError);
  EXPECT_FALSE(UsesCloud(PolicyKind::kExo));
  EXPECT_TRUE(UsesCloud(PolicyKind::kStr));
}

TEST_F(SimTest, ExpertOnlyNeverUsesCloud) {
  const SlotTrace t = Run("ExO");
  ASSERT_EQ(t.slots.size(), 150u);
  for (const auto& s : t.slots) {
    EXPECT_EQ(s.rho, 0.0);
    EXPECT_EQ(s.arrivals.comm, 0.0);
  }
  for (const auto& r : t.rows) EXPECT_EQ(r.mode, Mode::kExpertOnly);
  EXPECT_EQ(t.retrieval_calls, 0u);
}

TEST_F(SimTest, CloudOnlyQueueGrowsByComplementOfBudget) {
  const SlotTrace t = Run("CO");
  for (const auto& s : t.slots) EXPECT_EQ(s.rho, 1.0);
  const double T = static_cast<double>(t.slots.size());
  EXPECT_EQ(t.slots.back().queues.q_rho, T * (1.0 - config_->controller.rho_max));
}

TEST_F(SimTest, EdgeOnlyAndStrModes) {
  for (const auto& r : Run("EdO").rows) EXPECT_EQ(r.mode, Mode::kEdgeFusion);
  for (const auto& r : Run("STR").rows) EXPECT_NE(r.mode, Mode::kEdgeFusion);
  for (const auto& r : Run("ACA").rows) EXPECT_EQ(r.mode, Mode::kCloudAssisted);
}

TEST_F(SimTest, BridgingBoundHoldsForEveryPolicy) {
  for (const char* p : {"CAPE", "ExO", "EdO", "CO", "ACA", "STR"}) {
    const MetricReport m = ComputeMetrics(Run(p));
    for (int g = 0; g < 3; ++g) EXPECT_TRUE(m.bound_holds[g]) << p << " queue " << g;
  }
}

TEST_F(SimTest, RunsAreDeterministic) {
  const SlotTrace a = Run("CAPE"), b = Run("CAPE");
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mode, b.rows[i].mode);
    EXPECT_EQ(a.rows[i].loss, b.rows[i].loss);
  }
}

TEST_F(SimTest, TraceCsvReproducesMetrics) {
  const SlotTrace t = Run("CAPE");
  const auto path = (std::filesystem::temp_directory_path() / "pvroute_trace.csv").string();
  WriteTraceCsv(path, t);
  const auto a = MetricColumns(ComputeMetrics(t));
  const auto b = MetricColumns(ComputeMetrics(ReadTraceCsv(path)));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i].second)) {
      EXPECT_TRUE(std::isnan(b[i].second)) << a[i].first;
    } else {
      EXPECT_EQ(a[i].second, b[i].second) << a[i].first;
    }
  }
}

TEST_F(SimTest, ArtifactsRoundTrip) {
  const Json models = ModelsToJson(prepared_->models);
  const Json bundle = BundleToJson(prepared_->bundle);
  EXPECT_TRUE(ModelsFromJson(Json::parse(models.dump())) == prepared_->models);
  EXPECT_TRUE(BundleFromJson(Json::parse(bundle.dump())) == prepared_->bundle);
  Json bad = bundle;
  bad["version"] = 99;
  EXPECT_THROW(BundleFromJson(bad), SchemaError);
  bad = bundle;
  bad.erase("screening");
  EXPECT_THROW(BundleFromJson(bad), SchemaError);
}

TEST_F(SimTest, MismatchedBundleIsConfigError) {
  Bundle b = prepared_->bundle;
  b.horizon += 1;
  EXPECT_THROW(RunSimulation(prepared_->data, prepared_->models, b, *evaluation_,
                             *config_, ParsePolicy("CAPE")),
               ConfigError);
}

TEST_F(SimTest, PreparedBundleIsConsistent) {
  const Bundle& b = prepared_->bundle;
  EXPECT_EQ(b.node_ids.size(), 3u);
  EXPECT_EQ(b.cdf_seeds.size(), 3u);
  EXPECT_TRUE(b.screening.log_features);
  EXPECT_TRUE(b.gains.pooled.g1.IsNondecreasing());
  EXPECT_TRUE(b.gains.pooled.g2.IsNondecreasing());
  EXPECT_EQ(b.replay_size, prepared_->val_replay.size());
}

TEST(TuneStrThreshold, PrefixRespectsBudgets) {
  std::vector<ReplayRecord> replay(10);
  for (int i = 0; i < 10; ++i) {
    replay[i].node = i % 2;
    replay[i].calibrated_score = i / 10.0;
  }
  Budgets b;
  b.rho_max = 0.3;
  b.c_max = 1.0;
  b.tau_max = 1e9;
  const double t = TuneStrThreshold(replay, b, LatencyParams{}, {1.0, 1.0});
  int escalated = 0;
  for (const auto& r : replay) escalated += r.calibrated_score >= t ? 1 : 0;
  EXPECT_EQ(escalated, 3);
}

TEST(WithAxisValue, KnownAxesOnly) {
  const RunConfig c = ParseConfig(Json::object());
  EXPECT_EQ(WithAxisValue(c, "V", 10).controller.controller.V, 10.0);
  EXPECT_EQ(WithAxisValue(c, "K", 4).model.k, 4);
  EXPECT_THROW(WithAxisValue(c, "K", 2.5), ConfigError);
  EXPECT_THROW(WithAxisValue(c, "eta", 1), ConfigError);
}

}  // namespace
}  // namespace pvroute
