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

#include "pvroute/config.h"
#include "pvroute/errors.h"

namespace pvroute {
namespace {

TEST(ParseConfig, DefaultsAreValid) {
  const RunConfig c = ParseConfig(Json::object());
  EXPECT_EQ(c.controller.controller.V, 80.0);
  EXPECT_EQ(c.model.k, 8);
  EXPECT_EQ(c.screening.w_cdf, 512);
  const Budgets b = c.BudgetsFor({"a", "b"});
  EXPECT_NEAR(b.c_max, 0.6 * 1.0 * 0.5, 1e-15);
  EXPECT_EQ(b.tau_max, 120.0);
}

TEST(ParseConfig, UnknownKeysAndBadTypesAreRejected) {
  EXPECT_THROW(ParseConfig(Json{{"model", {{"kk", 3}}}}), ConfigError);
  EXPECT_THROW(ParseConfig(Json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(ParseConfig(Json{{"model", {{"k", "three"}}}}), ConfigError);
  EXPECT_THROW(ParseConfig(Json{{"controller", {{"V", -1.0}}}}), ConfigError);
  EXPECT_THROW(ParseConfig(Json{{"policy", "NOPE"}}), ConfigError);
}

TEST(ApplyOverride, NestedAndTyped) {
  Json doc = Json::object();
  ApplyOverride(doc, "controller.V=10");
  ApplyOverride(doc, "fusion.prior=inverse_loss");
  ApplyOverride(doc, "controller.latency.tau_s=30");
  const RunConfig c = ParseConfig(doc);
  EXPECT_EQ(c.controller.controller.V, 10.0);
  EXPECT_EQ(c.fusion.prior, "inverse_loss");
  EXPECT_EQ(c.controller.latency.fallback.tau_s, 30.0);
  EXPECT_THROW(ApplyOverride(doc, "novalue"), ConfigError);
}

TEST(ConfigToJson, RoundTrips) {
  Json doc = Json::object();
  ApplyOverride(doc, "seed=9");
  ApplyOverride(doc, "controller.c_max=0.2");
  ApplyOverride(doc, "controller.kappa_per_node={\"site1\":2.0}");
  const RunConfig a = ParseConfig(doc);
  const RunConfig b = ParseConfig(ConfigToJson(a));
  EXPECT_EQ(ConfigToJson(a), ConfigToJson(b));
  EXPECT_EQ(b.BudgetsFor({"site0"}).c_max, 0.2);
  EXPECT_EQ(b.KappaFor({"site0", "site1"}), (std::vector<double>{1.0, 2.0}));
}

TEST(ParseConfig, PerNodeKappaShiftsDefaultCommBudget) {
  Json doc = Json::object();
  ApplyOverride(doc, "controller.kappa_per_node={\"b\":3.0}");
  const RunConfig c = ParseConfig(doc);
  EXPECT_NEAR(c.BudgetsFor({"a", "b"}).c_max, 0.6 * 2.0 * 0.5, 1e-15);
}

}  // namespace
}  // namespace pvroute
