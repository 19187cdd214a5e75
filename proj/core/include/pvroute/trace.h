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

#ifndef PVROUTE_TRACE_H_
#define PVROUTE_TRACE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pvroute/queues.h"
#include "pvroute/types.h"

namespace pvroute {

// One node in one slot.
struct NodeSlotRecord {
  std::int64_t slot = 0;
  int node = 0;
  Mode mode = Mode::kExpertOnly;
  double score = 0.0;       // routing score r
  double calibrated = 0.0;  // alpha * r
  double j0 = 0.0, j1 = 0.0, j2 = 0.0;
  double theta_c = 0.0;
  double latency = 0.0;
  double comm = 0.0;
  std::vector<double> weights;  // fusion weights used, (e, s, c) order
  bool cloud_fallback = false;
  // Filled at reveal.
  bool revealed = false;
  double loss = 0.0;
  double abs_err = 0.0;  // mean absolute error over the horizon
  double sq_err = 0.0;   // mean squared error over the horizon
  // Evaluation labels.
  int oracle_label = 0;
  bool ramp = false;
  bool ood = false;
};

// Network-level state of one slot. Queues are after the slot's update.
struct SlotRecord {
  std::int64_t slot = 0;
  double rho = 0.0;       // realized fraction of nodes in mode 2
  double rho_star = 0.0;  // fixed-point estimate
  double fp_residual = 0.0;
  Arrivals arrivals;
  QueueState queues;
  double avg_loss = 0.0;  // mean realized loss of the slot's nodes
  int revealed = 0;       // nodes of this slot whose labels were revealed
};

struct SlotTrace {
  int nodes = 0;
  int horizon = 0;
  Budgets budgets;
  std::vector<SlotRecord> slots;
  std::vector<NodeSlotRecord> rows;  // (slot, node) order
  std::size_t retrieval_calls = 0;
  std::size_t cloud_fallbacks = 0;
  std::size_t missing_targets = 0;
};

// Column order of the per-node CSV; slot-level and budget columns are
// repeated on every row so the file alone determines every metric.
const std::vector<std::string>& TraceColumns();

void WriteTraceCsv(const std::string& path, const SlotTrace& trace);
// Throws DataError or SchemaError on malformed files.
SlotTrace ReadTraceCsv(const std::string& path);

}  // namespace pvroute

#endif  // PVROUTE_TRACE_H_
