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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pvroute/data.h"
#include "pvroute/errors.h"
#include "pvroute/synth.h"

namespace pvroute {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pvroute_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

RawSeries Ramp(int rows, double capacity = 10.0) {
  RawSeries s;
  s.node_id = "a";
  s.capacity = capacity;
  s.covariate_names = {"w"};
  s.covariates.assign(1, {});
  for (int t = 0; t < rows; ++t) {
    s.timestamps.push_back(900LL * t);
    s.power.push_back(static_cast<double>(t % 10));
    s.covariates[0].push_back(0.1 * t);
  }
  return s;
}

TEST(ParseTimestamp, Rfc3339AndEpoch) {
  EXPECT_EQ(ParseTimestamp("2024-01-01T00:00:00Z"), 1704067200);
  EXPECT_EQ(ParseTimestamp("2024-01-01T01:00:00+01:00"), 1704067200);
  EXPECT_EQ(ParseTimestamp("1704067200"), 1704067200);
  EXPECT_EQ(ParseTimestamp(FormatTimestamp(1704070800)), 1704070800);
  EXPECT_THROW(ParseTimestamp("yesterday"), DataError);
}

TEST(LoadCsvDataset, InterleavedNodesAreSeparated) {
  const fs::path dir = TempDir("interleaved");
  WriteFile(dir / "d.csv",
            "timestamp,node_id,power,temp\n"
            "0,a,1,5\n0,b,2,6\n900,a,3,7\n900,b,4,8\n1800,a,5,9\n");
  const auto r = LoadCsvDataset({(dir / "d.csv").string()}, {},
                                {{"a", 10.0}, {"b", 20.0}});
  ASSERT_EQ(r.series.size(), 2u);
  EXPECT_EQ(r.series[0].node_id, "a");
  EXPECT_EQ(r.series[0].power, (std::vector<double>{1, 3, 5}));
  EXPECT_EQ(r.series[1].power, (std::vector<double>{2, 4}));
  EXPECT_EQ(r.series[1].capacity, 20.0);
  ASSERT_EQ(r.series[0].covariate_names.size(), 1u);
  EXPECT_EQ(r.series[0].covariates[0], (std::vector<double>{5, 7, 9}));
}

TEST(LoadCsvDataset, MissingColumnIsSchemaError) {
  const fs::path dir = TempDir("nocol");
  WriteFile(dir / "d.csv", "timestamp,node_id\n0,a\n");
  EXPECT_THROW(LoadCsvDataset({(dir / "d.csv").string()}, {}, {{"a", 1.0}}),
               SchemaError);
}

TEST(LoadCsvDataset, NodeWithoutCapacityIsSchemaError) {
  const fs::path dir = TempDir("nocap");
  WriteFile(dir / "d.csv", "timestamp,node_id,power\n0,a,1\n");
  EXPECT_THROW(LoadCsvDataset({(dir / "d.csv").string()}, {}, {}), SchemaError);
}

TEST(LoadCsvDataset, NonIncreasingTimestampsAreDataError) {
  const fs::path dir = TempDir("order");
  WriteFile(dir / "d.csv", "timestamp,node_id,power\n900,a,1\n0,a,2\n");
  EXPECT_THROW(LoadCsvDataset({(dir / "d.csv").string()}, {}, {{"a", 1.0}}),
               DataError);
}

TEST(LoadCsvDataset, MalformedRowsAreDroppedAndCounted) {
  const fs::path dir = TempDir("drop");
  WriteFile(dir / "d.csv", "timestamp,node_id,power\n0,a,1\n900,a,\n1800,a,x\n2700,a,2\n");
  const auto r = LoadCsvDataset({(dir / "d.csv").string()}, {}, {{"a", 4.0}});
  EXPECT_EQ(r.dropped_rows, 2u);
  EXPECT_EQ(r.series[0].size(), 2u);
}

TEST(CsvRoundTrip, WriteThenLoad) {
  const fs::path dir = TempDir("roundtrip");
  const RawSeries s = Ramp(20);
  WriteSeriesCsv((dir / "a.csv").string(), s);
  WriteCapacityCsv((dir / "cap.csv").string(), {s});
  const auto cap = LoadCapacityCsv((dir / "cap.csv").string());
  const auto r = LoadCsvDataset({(dir / "a.csv").string()}, {}, cap);
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.series[0].timestamps, s.timestamps);
  EXPECT_EQ(r.series[0].power, s.power);
  EXPECT_EQ(r.series[0].capacity, s.capacity);
}

TEST(BuildSamples, WindowUsesOnlyPastRecords) {
  const RawSeries s = Ramp(60);
  SampleOptions o;
  o.lags = 4;
  o.horizon = 3;
  o.mutation_window = 2;
  const auto built = BuildSamples(s, o);
  ASSERT_FALSE(built.samples.empty());
  for (const Sample& smp : built.samples) {
    const auto t = smp.window.slot;
    for (int j = 0; j < o.lags; ++j) {
      EXPECT_DOUBLE_EQ(smp.window.features[j], s.power[t - o.lags + j] / 10.0);
    }
    EXPECT_DOUBLE_EQ(smp.window.features[o.lags], s.covariates[0][t - 1]);
    EXPECT_DOUBLE_EQ(smp.window.last_power, s.power[t - 1] / 10.0);
    for (int h = 0; h < o.horizon; ++h) {
      EXPECT_DOUBLE_EQ(smp.target[h], s.power[t + h] / 10.0);
    }
    EXPECT_EQ(smp.reveal_slot, t + o.horizon);
  }
  EXPECT_EQ(built.samples.size(), 60u - o.lags - o.horizon + 1);
}

TEST(BuildSamples, PowerAboveCapacityIsClampedAndCounted) {
  RawSeries s = Ramp(20);
  s.power[10] = 25.0;
  SampleOptions o;
  o.lags = 2;
  o.horizon = 1;
  const auto built = BuildSamples(s, o);
  EXPECT_EQ(built.clamped_power, 1u);
  for (const Sample& smp : built.samples) {
    for (int j = 0; j < o.lags; ++j) EXPECT_LE(smp.window.features[j], 1.0);
    for (double v : smp.target) EXPECT_LE(v, 1.0);
  }
}

TEST(BuildSamples, GapsBreakWindows) {
  RawSeries s = Ramp(30);
  s.timestamps.erase(s.timestamps.begin() + 15);
  s.power.erase(s.power.begin() + 15);
  s.covariates[0].erase(s.covariates[0].begin() + 15);
  SampleOptions o;
  o.lags = 3;
  o.horizon = 2;
  const auto built = BuildSamples(s, 0, o, SlotGrid{0, 900});
  for (const Sample& smp : built.samples) {
    const auto t = smp.window.slot;
    EXPECT_FALSE(t - o.lags <= 15 && 15 < t + o.horizon) << "slot " << t;
  }
}

TEST(BuildSamples, CalendarHarmonics) {
  const RawSeries s = Ramp(40);
  SampleOptions o;
  o.lags = 2;
  o.horizon = 1;
  o.harmonics = 3;
  const auto built = BuildSamples(s, o);
  const Sample& smp = built.samples.front();
  ASSERT_EQ(smp.window.features.size(), 2u + 1u + 6u);
  const double frac = static_cast<double>(smp.window.timestamp % 86400) / 86400.0;
  for (int k = 1; k <= 3; ++k) {
    EXPECT_NEAR(smp.window.features[3 + 2 * (k - 1)], std::sin(2 * std::numbers::pi * k * frac), 1e-12);
    EXPECT_NEAR(smp.window.features[4 + 2 * (k - 1)], std::cos(2 * std::numbers::pi * k * frac), 1e-12);
  }
}

TEST(BuildSamples, SkipNightDropsAllZeroSamples) {
  RawSeries s = Ramp(40);
  for (int t = 0; t < 20; ++t) s.power[t] = 0.0;
  SampleOptions o;
  o.lags = 2;
  o.horizon = 2;
  const auto all = BuildSamples(s, o).samples.size();
  o.skip_night = true;
  const auto day = BuildSamples(s, o).samples;
  EXPECT_LT(day.size(), all);
  for (const Sample& smp : day) {
    double sum = smp.window.last_power;
    for (double v : smp.target) sum += v;
    EXPECT_GT(sum, 0.0);
  }
}

TEST(ChronologicalSplit, TenSampleHandFixture) {
  std::vector<Sample> samples(10);
  for (int t = 0; t < 10; ++t) {
    samples[t].window.slot = t;
    samples[t].reveal_slot = t + 2;
  }
  // Blocks {0..5}, {6,7}, {8,9}; samples whose target straddles a boundary
  // (slots 5 and 7) are dropped.
  const Split s = ChronologicalSplit(samples, {});
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.val.size(), 1u);
  EXPECT_EQ(s.test.size(), 2u);
  EXPECT_EQ(s.val.front().window.slot, 6);
  for (const Sample& x : s.train) EXPECT_LE(x.reveal_slot, 6);
}

TEST(ChronologicalSplit, InvalidFractionsThrow) {
  SplitSpec spec{0.7, 0.3, 0.3};
  EXPECT_THROW(spec.Validate(), ConfigError);
}

TEST(Synthesize, DeterministicForSeed) {
  SyntheticConfig c;
  c.nodes = 2;
  c.slots = 500;
  const auto a = Synthesize(c, 5);
  const auto b = Synthesize(c, 5);
  const auto d = Synthesize(c, 6);
  EXPECT_EQ(a[1].power, b[1].power);
  EXPECT_NE(a[1].power, d[1].power);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].size(), 500u);
}

TEST(Synthesize, PowerWithinCapacity) {
  SyntheticConfig c;
  c.nodes = 3;
  c.slots = 2000;
  for (const RawSeries& s : Synthesize(c, 1)) {
    EXPECT_NO_THROW(s.Validate());
    for (double p : s.power) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, s.capacity);
    }
  }
}

TEST(Synthesize, RegimeFrequenciesMatchStationaryDistribution) {
  SyntheticConfig c;
  c.nodes = 1;
  c.slots = 10000;
  c.hazard = 1.0;
  c.transition = {{{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.3, 0.4}}};
  // pi = pi P by power iteration.
  std::array<double, 3> pi = {1.0, 0.0, 0.0};
  for (int it = 0; it < 500; ++it) {
    std::array<double, 3> next{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) next[j] += pi[i] * c.transition[i][j];
    }
    pi = next;
  }
  const auto s = Synthesize(c, 11).front();
  std::array<double, 3> freq{};
  for (int r : s.regimes) freq[r] += 1.0 / s.regimes.size();
  for (int k = 0; k < 3; ++k) {
    // Serial correlation roughly doubles the variance of the mean here.
    const double sigma = std::sqrt(2.0 * pi[k] * (1 - pi[k]) / s.regimes.size());
    EXPECT_NEAR(freq[k], pi[k], 3 * sigma) << "regime " << k;
  }
}

TEST(InferSlotGrid, OriginAndCadence) {
  RawSeries a = Ramp(5), b = Ramp(5);
  for (auto& t : b.timestamps) t += 1800;
  const SlotGrid g = InferSlotGrid({a, b});
  EXPECT_EQ(g.origin, 0);
  EXPECT_EQ(g.cadence, 900);
  EXPECT_EQ(g.SlotOf(2700), 3);
}

}  // namespace
}  // namespace pvroute
