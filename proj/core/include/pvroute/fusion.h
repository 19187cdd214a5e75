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

#ifndef PVROUTE_FUSION_H_
#define PVROUTE_FUSION_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <vector>

#include "pvroute/calibration.h"
#include "pvroute/types.h"

namespace pvroute {

struct FusionConfig {
  double eta = 0.5;
  std::vector<double> prior1 = {0.5, 0.5};               // over (e, s)
  std::vector<double> prior2 = {1.0 / 3, 1.0 / 3, 1.0 / 3};  // over (e, s, c)

  const std::vector<double>& Prior(Mode mode) const;
  // Throws ConfigError unless eta > 0 and priors are positive and normalized.
  void Validate() const;
};

// w_m proportional to prior_m * exp(-eta * gamma_m), with the largest
// exponent subtracted first. Throws DimensionError on size mismatch.
std::vector<double> EntropicWeights(const std::vector<double>& prior,
                                    const std::vector<double>& gamma,
                                    double eta);

// Per (node, mode) cumulative revealed subgradient over the mode's active
// branches; mode 0 has none.
class CumulativeGradient {
 public:
  CumulativeGradient() = default;
  explicit CumulativeGradient(int nodes);

  const std::vector<double>& Get(int node, Mode mode) const;
  void Add(int node, Mode mode, const std::vector<double>& gradient);
  int nodes() const { return static_cast<int>(gamma1_.size()); }
  friend bool operator==(const CumulativeGradient&,
                         const CumulativeGradient&) = default;

 private:
  std::vector<double>& Mutable(int node, Mode mode);

  std::vector<std::vector<double>> gamma1_;
  std::vector<std::vector<double>> gamma2_;
};

// Closed-form FTRL weights for a fusing mode. Throws ConfigError for mode 0.
SimplexWeights FusionWeights(const FusionConfig& config,
                             const CumulativeGradient& gamma, int node,
                             Mode mode);

// Mode 0 emits the expert verbatim; other modes fuse with `weights`.
HorizonVector FuseAndEmit(Mode mode, const Candidates& candidates,
                          const SimplexWeights& weights);

struct PendingRecord {
  int node = 0;
  std::int64_t slot = 0;
  Mode mode = Mode::kExpertOnly;
  Candidates candidates;
  SimplexWeights weights;  // empty for mode 0
  double score = 0.0;
  std::int64_t reveal_slot = 0;
  bool update_gamma = true;  // false when the weights are not FTRL output
};

// Records ordered by (reveal_slot, slot, node).
class RevealBuffer {
 public:
  void Push(PendingRecord record);
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::deque<PendingRecord>& records() const { return records_; }
  // Removes and returns every record with reveal_slot <= slot.
  std::vector<PendingRecord> PopMatured(std::int64_t slot);
  // Puts records back, keeping the order.
  void Restore(std::vector<PendingRecord> records);

 private:
  std::deque<PendingRecord> records_;
};

struct RealizedLoss {
  int node = 0;
  std::int64_t slot = 0;
  Mode mode = Mode::kExpertOnly;
  double score = 0.0;
  double loss = 0.0;
  HorizonVector prediction;
  HorizonVector target;
};

struct RevealOutcome {
  std::vector<RealizedLoss> realized;  // (slot, node) order
  std::size_t missing_targets = 0;
};

// Returns the target of (node, slot), or nullptr if it is not available.
using TargetLookup =
    std::function<const HorizonVector*(int node, std::int64_t slot)>;

// For every matured record: realized loss with the weights actually used,
// Gamma update for fusing modes, calibrator update for every mode. Records
// whose target is missing stay in the buffer and are counted.
RevealOutcome RevealAndUpdate(RevealBuffer& buffer, CumulativeGradient& gamma,
                              ExecutedModeCalibrator* calibrator,
                              std::int64_t current_slot,
                              const TargetLookup& targets,
                              const LossSpec& spec = {});

struct RegretRound {
  HorizonVector target;
  Candidates candidates;
  SimplexWeights weights;  // weights the learner used
};

struct RegretReport {
  double learner_loss = 0.0;
  double comparator_loss = 0.0;
  double regret = 0.0;
  std::vector<double> comparator;  // best fixed weights, candidate-key order
  std::size_t rounds = 0;
};

// Regret against the best fixed simplex point in hindsight. The comparator
// is found by nested golden-section search, which needs only convexity.
// Throws DataError on an empty history.
RegretReport ComputeRegret(const std::vector<RegretRound>& rounds,
                           const LossSpec& spec = {});

}  // namespace pvroute

#endif  // PVROUTE_FUSION_H_
