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

#include "pvroute/trace.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitComma(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseDouble(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw DataError("trace: bad number '" + s + "'");
  }
  return v;
}

std::int64_t ParseInt(const std::string& s) {
  std::int64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw DataError("trace: bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

const std::vector<std::string>& TraceColumns() {
  static const std::vector<std::string> columns = {
      "slot",        "node",         "mode",          "score",
      "calibrated",  "j0",           "j1",            "j2",
      "theta_c",     "latency",      "comm",          "w_e",
      "w_s",         "w_c",          "cloud_fallback", "revealed",
      "loss",        "abs_err",      "sq_err",        "oracle_label",
      "ramp",        "ood",          "rho",           "rho_star",
      "fp_residual", "arr_latency",  "arr_comm",      "arr_rho",
      "q_tau",       "q_c",          "q_rho",         "slot_avg_loss",
      "slot_revealed", "tau_max",    "c_max",         "rho_max",
      "horizon"};
  return columns;
}

void WriteTraceCsv(const std::string& path, const SlotTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace '" + path + "'");
  const auto& cols = TraceColumns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out << (c ? "," : "") << cols[c];
  }
  out << '\n';
  std::map<std::int64_t, const SlotRecord*> by_slot;
  for (const SlotRecord& s : trace.slots) by_slot[s.slot] = &s;
  for (const NodeSlotRecord& r : trace.rows) {
    const auto it = by_slot.find(r.slot);
    if (it == by_slot.end()) throw DataError("trace: row without slot record");
    const SlotRecord& s = *it->second;
    out << r.slot << ',' << r.node << ',' << ModeIndex(r.mode) << ','
        << Num(r.score) << ',' << Num(r.calibrated) << ',' << Num(r.j0) << ','
        << Num(r.j1) << ',' << Num(r.j2) << ',' << Num(r.theta_c) << ','
        << Num(r.latency) << ',' << Num(r.comm);
    // Weights over (e, s, c); blank where the branch is inactive.
    for (std::size_t k = 0; k < 3; ++k) {
      out << ',';
      if (k < r.weights.size()) out << Num(r.weights[k]);
    }
    out << ',' << (r.cloud_fallback ? 1 : 0) << ',' << (r.revealed ? 1 : 0)
        << ',' << Num(r.loss) << ',' << Num(r.abs_err) << ','
        << Num(r.sq_err) << ',' << r.oracle_label << ',' << (r.ramp ? 1 : 0)
        << ',' << (r.ood ? 1 : 0) << ',' << Num(s.rho) << ','
        << Num(s.rho_star) << ',' << Num(s.fp_residual) << ','
        << Num(s.arrivals.latency) << ',' << Num(s.arrivals.comm) << ','
        << Num(s.arrivals.rho) << ',' << Num(s.queues.q_tau) << ','
        << Num(s.queues.q_c) << ',' << Num(s.queues.q_rho) << ','
        << Num(s.avg_loss) << ',' << s.revealed << ','
        << Num(trace.budgets.tau_max) << ',' << Num(trace.budgets.c_max)
        << ',' << Num(trace.budgets.rho_max) << ',' << trace.horizon << '\n';
  }
  if (!out) throw Error("failed writing trace '" + path + "'");
}

SlotTrace ReadTraceCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("trace: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitComma(line);
  const auto& cols = TraceColumns();
  if (header != cols) throw SchemaError("trace: unexpected header in " + path);

  SlotTrace trace;
  std::map<std::int64_t, SlotRecord> slots;
  int max_node = -1;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitComma(line);
    if (f.size() != cols.size()) {
      throw DataError("trace: wrong field count on line " +
                      std::to_string(lineno));
    }
    NodeSlotRecord r;
    std::size_t i = 0;
    r.slot = ParseInt(f[i++]);
    r.node = static_cast<int>(ParseInt(f[i++]));
    r.mode = ModeFromIndex(static_cast<int>(ParseInt(f[i++])));
    r.score = ParseDouble(f[i++]);
    r.calibrated = ParseDouble(f[i++]);
    r.j0 = ParseDouble(f[i++]);
    r.j1 = ParseDouble(f[i++]);
    r.j2 = ParseDouble(f[i++]);
    r.theta_c = ParseDouble(f[i++]);
    r.latency = ParseDouble(f[i++]);
    r.comm = ParseDouble(f[i++]);
    for (int k = 0; k < 3; ++k) {
      const std::string& cell = f[i++];
      if (!cell.empty()) r.weights.push_back(ParseDouble(cell));
    }
    r.cloud_fallback = ParseInt(f[i++]) != 0;
    r.revealed = ParseInt(f[i++]) != 0;
    r.loss = ParseDouble(f[i++]);
    r.abs_err = ParseDouble(f[i++]);
    r.sq_err = ParseDouble(f[i++]);
    r.oracle_label = static_cast<int>(ParseInt(f[i++]));
    r.ramp = ParseInt(f[i++]) != 0;
    r.ood = ParseInt(f[i++]) != 0;
    SlotRecord s;
    s.slot = r.slot;
    s.rho = ParseDouble(f[i++]);
    s.rho_star = ParseDouble(f[i++]);
    s.fp_residual = ParseDouble(f[i++]);
    s.arrivals.latency = ParseDouble(f[i++]);
    s.arrivals.comm = ParseDouble(f[i++]);
    s.arrivals.rho = ParseDouble(f[i++]);
    s.queues.q_tau = ParseDouble(f[i++]);
    s.queues.q_c = ParseDouble(f[i++]);
    s.queues.q_rho = ParseDouble(f[i++]);
    s.avg_loss = ParseDouble(f[i++]);
    s.revealed = static_cast<int>(ParseInt(f[i++]));
    trace.budgets.tau_max = ParseDouble(f[i++]);
    trace.budgets.c_max = ParseDouble(f[i++]);
    trace.budgets.rho_max = ParseDouble(f[i++]);
    trace.horizon = static_cast<int>(ParseInt(f[i++]));
    max_node = std::max(max_node, r.node);
    if (r.cloud_fallback) ++trace.cloud_fallbacks;
    slots.try_emplace(s.slot, s);
    trace.rows.push_back(std::move(r));
  }
  trace.nodes = max_node + 1;
  std::int64_t index = 0;
  for (auto& [slot, s] : slots) {
    s.queues.slot = ++index;
    trace.slots.push_back(s);
  }
  return trace;
}

}  // namespace pvroute
