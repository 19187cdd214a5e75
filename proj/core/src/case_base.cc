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

#include "pvroute/case_base.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "pvroute/errors.h"

namespace pvroute {

void CaseBase::Insert(Case c) {
  if (dim_ == 0 && cases_.empty()) dim_ = c.key.size();
  if (c.key.size() != dim_) throw DimensionError("case key dimension mismatch");
  // Insert after every case with end_slot <= c.end_slot (stable order).
  const auto pos = static_cast<std::size_t>(
      std::upper_bound(end_slots_.begin(), end_slots_.end(), c.end_slot) -
      end_slots_.begin());
  keys_.insert(keys_.begin() + static_cast<std::ptrdiff_t>(pos * dim_),
               c.key.begin(), c.key.end());
  end_slots_.insert(end_slots_.begin() + static_cast<std::ptrdiff_t>(pos),
                    c.end_slot);
  cases_.insert(cases_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(c));
  // Indices past pos shifted; the tree stays valid only for appends.
  if (pos < tree_size_) tree_size_ = 0;
  const std::size_t tail = cases_.size() - tree_size_;
  if (tail > std::max<std::size_t>(256, tree_size_ / 64)) Rebuild();
}

void CaseBase::InsertBatch(std::vector<Case> cases) {
  if (cases.empty()) return;
  if (dim_ == 0 && cases_.empty()) dim_ = cases.front().key.size();
  for (const Case& c : cases) {
    if (c.key.size() != dim_) throw DimensionError("case key dimension mismatch");
  }
  for (Case& c : cases) cases_.push_back(std::move(c));
  std::stable_sort(cases_.begin(), cases_.end(), [](const Case& a, const Case& b) {
    return a.end_slot < b.end_slot;
  });
  keys_.clear();
  end_slots_.clear();
  for (const Case& c : cases_) {
    keys_.insert(keys_.end(), c.key.begin(), c.key.end());
    end_slots_.push_back(c.end_slot);
  }
  Rebuild();
}

void CaseBase::Rebuild() {
  tree_size_ = cases_.size();
  nodes_.clear();
  node_lo_.clear();
  node_hi_.clear();
  tree_order_.resize(tree_size_);
  for (std::size_t i = 0; i < tree_size_; ++i) tree_order_[i] = i;
  if (tree_size_ > 0) BuildNode(0, tree_size_);
  tree_keys_.resize(tree_size_ * dim_);
  tree_slots_.resize(tree_size_);
  for (std::size_t r = 0; r < tree_size_; ++r) {
    const std::size_t i = tree_order_[r];
    std::copy_n(keys_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_,
                tree_keys_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
    tree_slots_[r] = end_slots_[i];
  }
}

std::size_t CaseBase::BuildNode(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end, 0, 0, std::numeric_limits<std::int64_t>::max()});
  node_lo_.resize(node_lo_.size() + dim_, std::numeric_limits<double>::infinity());
  node_hi_.resize(node_hi_.size() + dim_, -std::numeric_limits<double>::infinity());
  std::int64_t min_slot = std::numeric_limits<std::int64_t>::max();
  for (std::size_t r = begin; r < end; ++r) {
    const double* key = keys_.data() + tree_order_[r] * dim_;
    for (std::size_t j = 0; j < dim_; ++j) {
      node_lo_[id * dim_ + j] = std::min(node_lo_[id * dim_ + j], key[j]);
      node_hi_[id * dim_ + j] = std::max(node_hi_[id * dim_ + j], key[j]);
    }
    min_slot = std::min(min_slot, end_slots_[tree_order_[r]]);
  }
  nodes_[id].min_end_slot = min_slot;
  if (end - begin <= kLeafSize) return id;

  std::size_t axis = 0;
  double spread = -1.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double w = node_hi_[id * dim_ + j] - node_lo_[id * dim_ + j];
    if (w > spread) {
      spread = w;
      axis = j;
    }
  }
  if (!(spread > 0.0)) return id;  // all keys equal
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(tree_order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   tree_order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   tree_order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     const double ka = keys_[a * dim_ + axis];
                     const double kb = keys_[b * dim_ + axis];
                     return ka < kb || (ka == kb && a < b);
                   });
  const std::size_t left = BuildNode(begin, mid);
  const std::size_t right = BuildNode(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::size_t CaseBase::EligibleCount(std::int64_t before_slot) const {
  return static_cast<std::size_t>(
      std::lower_bound(end_slots_.begin(), end_slots_.end(), before_slot) -
      end_slots_.begin());
}

std::vector<Neighbor> CaseBase::Nearest(std::span<const double> query,
                                        std::size_t k,
                                        std::int64_t before_slot) const {
  if (query.size() != dim_ && !cases_.empty()) {
    throw DimensionError("query dimension mismatch");
  }
  const std::size_t eligible = EligibleCount(before_slot);
  std::vector<Neighbor> out;
  if (k == 0 || eligible == 0) return out;

  // Max-heap on (squared distance, index) holding the current k best.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  const double* q = query.data();
  const auto bound = [&] {
    return heap.size() == k ? heap.top().first
                            : std::numeric_limits<double>::infinity();
  };
  const auto offer = [&](const double* key, std::size_t index) {
    const double b = bound();
    double d2 = 0.0;
    std::size_t j = 0;
    // Abandon once the partial sum exceeds the current k-th best.
    for (; j < dim_; ++j) {
      const double diff = key[j] - q[j];
      d2 += diff * diff;
      if ((j & 3) == 3 && d2 > b) break;
    }
    if (j < dim_) return;
    if (heap.size() < k) {
      heap.emplace(d2, index);
    } else if (Entry{d2, index} < heap.top()) {
      heap.pop();
      heap.emplace(d2, index);
    }
  };
  // Box distances are summed in the same order as case distances, and
  // rounding is monotone, so a box never bounds above one of its cases.
  const auto box_bound = [&](std::size_t id) {
    const double* lo = node_lo_.data() + id * dim_;
    const double* hi = node_hi_.data() + id * dim_;
    double lb = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double gap = q[j] < lo[j] ? lo[j] - q[j] : q[j] > hi[j] ? q[j] - hi[j] : 0.0;
      lb += gap * gap;
    }
    return lb;
  };

  for (std::size_t i = tree_size_; i < eligible; ++i) {
    offer(keys_.data() + i * dim_, i);
  }
  if (tree_size_ > 0) {
    std::vector<Entry> stack{{box_bound(0), 0}};
    while (!stack.empty()) {
      const auto [lb, id] = stack.back();
      stack.pop_back();
      const Node& node = nodes_[id];
      if (node.min_end_slot >= before_slot || lb > bound()) continue;
      if (node.left == 0) {
        for (std::size_t r = node.begin; r < node.end; ++r) {
          if (tree_slots_[r] >= before_slot) continue;
          offer(tree_keys_.data() + r * dim_, tree_order_[r]);
        }
        continue;
      }
      const double lb_left = box_bound(node.left);
      const double lb_right = box_bound(node.right);
      // Nearer child on top of the stack.
      if (lb_left <= lb_right) {
        stack.emplace_back(lb_right, node.right);
        stack.emplace_back(lb_left, node.left);
      } else {
        stack.emplace_back(lb_left, node.left);
        stack.emplace_back(lb_right, node.right);
      }
    }
  }

  out.resize(heap.size());
  for (std::size_t r = out.size(); r-- > 0;) {
    out[r] = Neighbor{heap.top().second, std::sqrt(heap.top().first)};
    heap.pop();
  }
  return out;
}

CaseBase BuildCaseBase(const std::vector<Sample>& train_samples,
                       const QueryFn& query_fn) {
  std::vector<Case> cases;
  cases.reserve(train_samples.size());
  for (const Sample& s : train_samples) {
    cases.push_back(Case{query_fn(s.window), s.target, s.reveal_slot, s.window.node});
  }
  CaseBase base;
  base.InsertBatch(std::move(cases));
  return base;
}

}  // namespace pvroute
