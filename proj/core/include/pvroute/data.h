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

#ifndef PVROUTE_DATA_H_
#define PVROUTE_DATA_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pvroute/types.h"

namespace pvroute {

// One node's raw telemetry on a single slot cadence.
struct RawSeries {
  std::string node_id;
  std::vector<std::int64_t> timestamps;  // epoch seconds, strictly increasing
  std::vector<double> power;             // raw units, >= 0
  std::vector<std::string> covariate_names;
  std::vector<std::vector<double>> covariates;  // [column][row]
  double capacity = 1.0;
  // Hidden weather regime per row; only filled by the synthetic generator.
  std::vector<int> regimes;

  std::size_t size() const { return timestamps.size(); }
  // Throws DataError if an invariant does not hold.
  void Validate() const;
};

struct CsvSchema {
  std::string timestamp = "timestamp";
  std::string node = "node_id";
  std::string power = "power";
};

struct LoadResult {
  std::vector<RawSeries> series;  // ordered by first appearance of node id
  std::size_t dropped_rows = 0;
};

// Parses an RFC 3339 instant or (possibly fractional) epoch seconds.
// Throws DataError for anything else.
std::int64_t ParseTimestamp(std::string_view text);
std::string FormatTimestamp(std::int64_t epoch_seconds);

// Reads one or more CSV files into per-node series. Rows with a missing or
// unparseable required field are dropped and counted. Throws SchemaError for
// a missing required column or a node without capacity, and DataError for
// non-increasing timestamps within a node.
LoadResult LoadCsvDataset(const std::vector<std::string>& paths,
                          const CsvSchema& schema,
                          const std::map<std::string, double>& capacity);

// Reads `node_id,capacity` rows.
std::map<std::string, double> LoadCapacityCsv(const std::string& path);

void WriteSeriesCsv(const std::string& path, const RawSeries& series,
                    const CsvSchema& schema = {});
void WriteCapacityCsv(const std::string& path,
                      const std::vector<RawSeries>& series);

// Maps timestamps onto integer slot indices shared by all nodes.
struct SlotGrid {
  std::int64_t origin = 0;
  std::int64_t cadence = 1;

  std::int64_t SlotOf(std::int64_t timestamp) const {
    return (timestamp - origin) / cadence;
  }
};

// Origin = earliest timestamp, cadence = smallest positive spacing.
SlotGrid InferSlotGrid(const std::vector<RawSeries>& series);

// Column layout of ObservationWindow::features.
struct FeatureLayout {
  int lags = 24;
  int covariates = 0;
  int harmonics = 1;  // sin/cos pairs of the time of day

  int size() const { return lags + covariates + 2 * harmonics; }
  int covariate_offset() const { return lags; }
  int calendar_offset() const { return lags + covariates; }
  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

// Local model input of one node at one slot. Everything here is a function
// of records strictly before the slot start plus the slot's own calendar
// position.
struct ObservationWindow {
  int node = 0;  // index into the experiment's node list
  std::int64_t slot = 0;
  std::int64_t timestamp = 0;  // slot start
  // Lagged normalized power (oldest first), latest-past covariates, then
  // sin/cos of k times the time-of-day angle for k = 1..harmonics.
  std::vector<double> features;
  // Last W_mu covariate rows (oldest first), used for mutation intensity.
  std::vector<std::vector<double>> weather_recent;
  double last_power = 0.0;
};

struct Sample {
  ObservationWindow window;
  HorizonVector target;
  std::int64_t reveal_slot = 0;
  int regime = -1;  // regime at the first target step, -1 when unknown
};

struct SampleOptions {
  int lags = 24;
  int horizon = 12;
  int mutation_window = 6;
  int harmonics = 1;
  // Drop samples whose last lag and whole target are zero.
  bool skip_night = false;
};

struct SampleBuild {
  std::vector<Sample> samples;
  std::size_t clamped_power = 0;  // entries with power > capacity
};

// One sample per slot t whose lag window [t - lags, t) and target window
// [t, t + horizon) are complete and gap-free. reveal_slot = t + horizon.
SampleBuild BuildSamples(const RawSeries& series, int node_index,
                         const SampleOptions& options, const SlotGrid& grid);

inline SampleBuild BuildSamples(const RawSeries& series,
                                const SampleOptions& options) {
  return BuildSamples(series, 0, options, InferSlotGrid({series}));
}

struct SplitSpec {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;

  void Validate() const;
};

struct Split {
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;
};

// Splits the distinct slots of `samples` into contiguous blocks and drops
// every sample of an earlier block whose target reaches into the next block.
// Expects samples sorted by slot.
Split ChronologicalSplit(const std::vector<Sample>& samples,
                         const SplitSpec& spec);

}  // namespace pvroute

#endif  // PVROUTE_DATA_H_
