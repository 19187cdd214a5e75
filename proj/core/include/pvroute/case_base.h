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

#ifndef PVROUTE_CASE_BASE_H_
#define PVROUTE_CASE_BASE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pvroute/data.h"
#include "pvroute/types.h"

namespace pvroute {

struct Case {
  std::vector<double> key;
  HorizonVector trajectory;
  std::int64_t end_slot = 0;  // slot at which the trajectory became known
  int node = 0;
};

struct Neighbor {
  std::size_t index = 0;  // position in the case base
  double distance = 0.0;
};

// Global historical case base with exact Euclidean k-nearest-neighbor search.
// Cases are kept ordered by end_slot so the temporal filter is a prefix.
// A k-d tree covers a leading range of cases and later inserts are scanned
// linearly until the next rebuild; results equal a full linear scan.
class CaseBase {
 public:
  CaseBase() = default;
  explicit CaseBase(std::size_t key_dim) : dim_(key_dim) {}

  // Throws DimensionError when the key length differs from the base's.
  void Insert(Case c);
  // Same order as inserting one by one, with a single index rebuild.
  void InsertBatch(std::vector<Case> cases);

  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  std::size_t dim() const { return dim_; }
  const Case& at(std::size_t index) const { return cases_[index]; }

  // Number of cases with end_slot < before_slot.
  std::size_t EligibleCount(std::int64_t before_slot) const;

  // The k nearest cases among those with end_slot < before_slot, sorted by
  // (distance, index).
  std::vector<Neighbor> Nearest(std::span<const double> query, std::size_t k,
                                std::int64_t before_slot) const;

 private:
  struct Node {
    std::size_t begin = 0, end = 0;  // range in tree_order_
    std::size_t left = 0, right = 0;  // children; 0 for a leaf
    std::int64_t min_end_slot = 0;
  };
  static constexpr std::size_t kLeafSize = 16;

  void Rebuild();
  std::size_t BuildNode(std::size_t begin, std::size_t end);

  std::size_t dim_ = 0;
  std::vector<Case> cases_;
  std::vector<double> keys_;  // row-major copy of every key
  std::vector<std::int64_t> end_slots_;
  // Tree over cases [0, tree_size_); node boxes are row-major.
  std::size_t tree_size_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> node_lo_;
  std::vector<double> node_hi_;
  std::vector<std::size_t> tree_order_;  // case indices, leaf-contiguous
  std::vector<double> tree_keys_;        // keys in tree_order_, row-major
  std::vector<std::int64_t> tree_slots_;  // end slots in tree_order_
};

using QueryFn = std::function<std::vector<double>(const ObservationWindow&)>;

// One case per sample with end_slot = reveal_slot.
CaseBase BuildCaseBase(const std::vector<Sample>& train_samples,
                       const QueryFn& query_fn);

}  // namespace pvroute

#endif  // PVROUTE_CASE_BASE_H_
