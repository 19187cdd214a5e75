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

#include "pvroute/data.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '"')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '"' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      break;
    }
    out.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool ParseDouble(std::string_view text, double* out) {
  text = Trim(text);
  if (text.empty()) return false;
  // from_chars rejects a leading '+'.
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), *out);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         std::isfinite(*out);
}

bool ParseInt(std::string_view text, int* out) {
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), *out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool LooksNumeric(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
          c == '-' || c == '+' || c == 'e' || c == 'E')) {
      return false;
    }
  }
  return true;
}

// YYYY-MM-DD[T ]HH:MM:SS[.fff](Z|+HH:MM|-HH:MM)
bool ParseRfc3339(std::string_view s, std::int64_t* out) {
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' ||
      (s[10] != 'T' && s[10] != 't' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':') {
    return false;
  }
  int year, month, day, hour, minute, second;
  if (!ParseInt(s.substr(0, 4), &year) || !ParseInt(s.substr(5, 2), &month) ||
      !ParseInt(s.substr(8, 2), &day) || !ParseInt(s.substr(11, 2), &hour) ||
      !ParseInt(s.substr(14, 2), &minute) ||
      !ParseInt(s.substr(17, 2), &second)) {
    return false;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ++pos;
    }
  }
  int offset_seconds = 0;
  if (pos < s.size()) {
    const char z = s[pos];
    if (z == 'Z' || z == 'z') {
      ++pos;
    } else if (z == '+' || z == '-') {
      int oh, om;
      if (s.size() < pos + 6 || s[pos + 3] != ':' ||
          !ParseInt(s.substr(pos + 1, 2), &oh) ||
          !ParseInt(s.substr(pos + 4, 2), &om)) {
        return false;
      }
      offset_seconds = (z == '+' ? 1 : -1) * (oh * 3600 + om * 60);
      pos += 6;
    } else {
      return false;
    }
  }
  if (pos != s.size()) return false;
  const std::chrono::year_month_day ymd{
      std::chrono::year{year},
      std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return false;
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  *out = static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 +
         second - offset_seconds;
  return true;
}

int ColumnIndex(const std::vector<std::string_view>& header,
                std::string_view name) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

void RawSeries::Validate() const {
  if (!(capacity > 0.0)) {
    throw DataError("node " + node_id + ": capacity must be positive");
  }
  if (power.size() != timestamps.size()) {
    throw DataError("node " + node_id + ": power/timestamp length mismatch");
  }
  if (covariates.size() != covariate_names.size()) {
    throw DataError("node " + node_id + ": covariate name count mismatch");
  }
  for (const auto& column : covariates) {
    if (column.size() != timestamps.size()) {
      throw DataError("node " + node_id + ": covariate length mismatch");
    }
  }
  for (std::size_t k = 1; k < timestamps.size(); ++k) {
    if (timestamps[k] <= timestamps[k - 1]) {
      throw DataError("node " + node_id + ": timestamps not increasing");
    }
  }
  for (double p : power) {
    if (!(p >= 0.0)) throw DataError("node " + node_id + ": negative power");
  }
}

std::int64_t ParseTimestamp(std::string_view text) {
  text = Trim(text);
  std::int64_t out = 0;
  if (ParseRfc3339(text, &out)) return out;
  double epoch = 0.0;
  if (LooksNumeric(text) && ParseDouble(text, &epoch)) {
    return static_cast<std::int64_t>(std::floor(epoch));
  }
  throw DataError("unparseable timestamp: " + std::string(text));
}

std::string FormatTimestamp(std::int64_t epoch_seconds) {
  const std::int64_t days =
      (epoch_seconds >= 0 ? epoch_seconds : epoch_seconds - 86399) / 86400;
  const std::int64_t rem = epoch_seconds - days * 86400;
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
  return buf;
}

LoadResult LoadCsvDataset(const std::vector<std::string>& paths,
                          const CsvSchema& schema,
                          const std::map<std::string, double>& capacity) {
  LoadResult result;
  std::map<std::string, std::size_t> index_of;
  std::vector<std::string> covariate_names;
  bool first_file = true;

  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty data file: " + path);
    const std::string header_line = line;
    const auto header_view = SplitCsvLine(header_line);
    const int ts_col = ColumnIndex(header_view, schema.timestamp);
    const int node_col = ColumnIndex(header_view, schema.node);
    const int power_col = ColumnIndex(header_view, schema.power);
    if (ts_col < 0 || node_col < 0 || power_col < 0) {
      throw SchemaError("missing required column (" + schema.timestamp + ", " +
                        schema.node + ", " + schema.power + ") in " + path);
    }
    std::vector<int> cov_cols;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < header_view.size(); ++k) {
      const int col = static_cast<int>(k);
      if (col == ts_col || col == node_col || col == power_col) continue;
      cov_cols.push_back(col);
      names.emplace_back(header_view[k]);
    }
    if (first_file) {
      covariate_names = names;
      first_file = false;
    } else if (names != covariate_names) {
      throw SchemaError("covariate columns differ across files: " + path);
    }

    while (std::getline(in, line)) {
      if (Trim(line).empty()) continue;
      const auto fields = SplitCsvLine(line);
      if (fields.size() != header_view.size()) {
        ++result.dropped_rows;
        continue;
      }
      std::int64_t ts = 0;
      double power = 0.0;
      try {
        ts = ParseTimestamp(fields[ts_col]);
      } catch (const DataError&) {
        ++result.dropped_rows;
        continue;
      }
      const std::string node(fields[node_col]);
      if (node.empty() || !ParseDouble(fields[power_col], &power) ||
          power < 0.0) {
        ++result.dropped_rows;
        continue;
      }
      std::vector<double> covs(cov_cols.size());
      bool ok = true;
      for (std::size_t c = 0; c < cov_cols.size(); ++c) {
        ok = ok && ParseDouble(fields[cov_cols[c]], &covs[c]);
      }
      if (!ok) {
        ++result.dropped_rows;
        continue;
      }
      auto [it, inserted] = index_of.emplace(node, result.series.size());
      if (inserted) {
        RawSeries s;
        s.node_id = node;
        s.covariate_names = covariate_names;
        s.covariates.assign(covariate_names.size(), {});
        const auto cap = capacity.find(node);
        if (cap == capacity.end()) {
          throw SchemaError("no capacity for node " + node);
        }
        s.capacity = cap->second;
        result.series.push_back(std::move(s));
      }
      RawSeries& s = result.series[it->second];
      if (!s.timestamps.empty() && ts <= s.timestamps.back()) {
        throw DataError("node " + node + ": timestamps not increasing at " +
                        std::string(fields[ts_col]));
      }
      s.timestamps.push_back(ts);
      s.power.push_back(power);
      for (std::size_t c = 0; c < covs.size(); ++c) {
        s.covariates[c].push_back(covs[c]);
      }
    }
  }
  for (const RawSeries& s : result.series) s.Validate();
  return result;
}

std::map<std::string, double> LoadCapacityCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open capacity file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty capacity file");
  const std::string header_line = line;
  const auto header = SplitCsvLine(header_line);
  const int node_col = ColumnIndex(header, "node_id");
  const int cap_col = ColumnIndex(header, "capacity");
  if (node_col < 0 || cap_col < 0) {
    throw SchemaError("capacity file needs node_id,capacity columns");
  }
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    const auto fields = SplitCsvLine(line);
    double cap = 0.0;
    if (fields.size() != header.size() || !ParseDouble(fields[cap_col], &cap) ||
        !(cap > 0.0)) {
      throw SchemaError("bad capacity row: " + line);
    }
    out[std::string(fields[node_col])] = cap;
  }
  return out;
}

void WriteSeriesCsv(const std::string& path, const RawSeries& series,
                    const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << schema.timestamp << ',' << schema.node << ',' << schema.power;
  for (const auto& name : series.covariate_names) out << ',' << name;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < series.size(); ++r) {
    out << series.timestamps[r] << ',' << series.node_id;
    std::snprintf(buf, sizeof(buf), ",%.17g", series.power[r]);
    out << buf;
    for (const auto& column : series.covariates) {
      std::snprintf(buf, sizeof(buf), ",%.17g", column[r]);
      out << buf;
    }
    out << '\n';
  }
}

void WriteCapacityCsv(const std::string& path,
                      const std::vector<RawSeries>& series) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "node_id,capacity\n";
  char buf[64];
  for (const RawSeries& s : series) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.capacity);
    out << s.node_id << ',' << buf << '\n';
  }
}

SlotGrid InferSlotGrid(const std::vector<RawSeries>& series) {
  SlotGrid grid;
  bool any = false;
  std::int64_t cadence = 0;
  for (const RawSeries& s : series) {
    if (s.timestamps.empty()) continue;
    if (!any || s.timestamps.front() < grid.origin) {
      grid.origin = s.timestamps.front();
    }
    any = true;
    for (std::size_t k = 1; k < s.timestamps.size(); ++k) {
      const std::int64_t d = s.timestamps[k] - s.timestamps[k - 1];
      if (d > 0 && (cadence == 0 || d < cadence)) cadence = d;
    }
  }
  grid.cadence = cadence > 0 ? cadence : 1;
  return grid;
}

SampleBuild BuildSamples(const RawSeries& series, int node_index,
                         const SampleOptions& options, const SlotGrid& grid) {
  if (options.lags < 1 || options.horizon < 1 || options.mutation_window < 1 ||
      options.harmonics < 1) {
    throw ConfigError("lags, horizon, mutation window and harmonics must be positive");
  }
  SampleBuild out;
  const std::size_t n = series.size();
  const std::size_t W = static_cast<std::size_t>(options.lags);
  const std::size_t H = static_cast<std::size_t>(options.horizon);
  const std::size_t C = series.covariates.size();
  if (n < W + H) return out;

  std::vector<double> norm(n);
  std::vector<std::int64_t> slot(n);
  for (std::size_t r = 0; r < n; ++r) {
    double y = series.power[r] / series.capacity;
    if (y > 1.0) {
      ++out.clamped_power;
      y = 1.0;
    }
    norm[r] = std::max(0.0, y);
    slot[r] = grid.SlotOf(series.timestamps[r]);
  }

  for (std::size_t t = W; t + H <= n; ++t) {
    // The rows [t - W, t + H) must sit on consecutive slots.
    if (slot[t + H - 1] - slot[t - W] !=
        static_cast<std::int64_t>(W + H - 1)) {
      continue;
    }
    Sample s;
    ObservationWindow& w = s.window;
    w.node = node_index;
    w.slot = slot[t];
    w.timestamp = series.timestamps[t];
    w.features.reserve(W + C + 2 * static_cast<std::size_t>(options.harmonics));
    for (std::size_t k = t - W; k < t; ++k) w.features.push_back(norm[k]);
    for (std::size_t c = 0; c < C; ++c) {
      w.features.push_back(series.covariates[c][t - 1]);
    }
    const double day_fraction =
        static_cast<double>(((w.timestamp % 86400) + 86400) % 86400) / 86400.0;
    for (int k = 1; k <= options.harmonics; ++k) {
      const double angle = 2.0 * std::numbers::pi * k * day_fraction;
      w.features.push_back(std::sin(angle));
      w.features.push_back(std::cos(angle));
    }
    w.last_power = norm[t - 1];

    const std::size_t mu_rows =
        std::min(static_cast<std::size_t>(options.mutation_window), t);
    for (std::size_t k = t - mu_rows; k < t; ++k) {
      // Rows before a gap are not part of this window's history.
      if (slot[t] - slot[k] > static_cast<std::int64_t>(mu_rows)) continue;
      std::vector<double> row(C);
      for (std::size_t c = 0; c < C; ++c) row[c] = series.covariates[c][k];
      w.weather_recent.push_back(std::move(row));
    }

    if (options.skip_night && norm[t - 1] == 0.0 &&
        std::all_of(norm.begin() + t, norm.begin() + t + H,
                    [](double y) { return y == 0.0; })) {
      continue;
    }
    s.target = HorizonVector(
        std::vector<double>(norm.begin() + t, norm.begin() + t + H));
    s.reveal_slot = w.slot + static_cast<std::int64_t>(H);
    if (!series.regimes.empty()) s.regime = series.regimes[t];
    out.samples.push_back(std::move(s));
  }
  return out;
}

void SplitSpec::Validate() const {
  if (train < 0.0 || val < 0.0 || test < 0.0) {
    throw ConfigError("split fractions must be nonnegative");
  }
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

Split ChronologicalSplit(const std::vector<Sample>& samples,
                         const SplitSpec& spec) {
  spec.Validate();
  Split out;
  if (samples.empty()) return out;
  std::set<std::int64_t> distinct;
  for (const Sample& s : samples) distinct.insert(s.window.slot);
  const std::vector<std::int64_t> slots(distinct.begin(), distinct.end());
  const std::size_t n = slots.size();
  const auto n_train =
      static_cast<std::size_t>(std::floor(spec.train * n + 1e-9));
  const auto n_val = std::min(
      n - n_train, static_cast<std::size_t>(std::floor(spec.val * n + 1e-9)));
  // First slot of the validation and test blocks (sentinel past the end).
  const std::int64_t kEnd = std::numeric_limits<std::int64_t>::max();
  const std::int64_t val_start = n_train < n ? slots[n_train] : kEnd;
  const std::int64_t test_start =
      n_train + n_val < n ? slots[n_train + n_val] : kEnd;

  for (const Sample& s : samples) {
    const std::int64_t t = s.window.slot;
    if (t < val_start) {
      if (val_start == kEnd || s.reveal_slot <= val_start) {
        out.train.push_back(s);
      }
    } else if (t < test_start) {
      if (test_start == kEnd || s.reveal_slot <= test_start) {
        out.val.push_back(s);
      }
    } else {
      out.test.push_back(s);
    }
  }
  return out;
}

}  // namespace pvroute
