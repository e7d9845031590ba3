// Copyright 2026 The permsync Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Consensus protocol on doubly stochastic matrices.
//
// Every non-distinguished sensor i repeatedly replaces its relaxed label by
//
//   P_i <- (P_i + sum_{j in N_i} assoc(i, j) P_j) / (|N_i| + 1)
//
// while the distinguished sensor keeps its initial permutation, which fixes
// the global permutation ambiguity. The limit is rounded per sensor with the
// Hungarian method.

#ifndef PERMSYNC_CONSENSUS_H_
#define PERMSYNC_CONSENSUS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "permsync/assoc.h"
#include "permsync/common.h"
#include "permsync/graph.h"
#include "permsync/simnet.h"

namespace permsync {

enum class ConsensusInit { kIdentity, kUniform, kRandomPermutation };

struct ConsensusConfig {
  int max_iters = 1000;
  // Stop once the largest entry change of a round drops below this.
  double conv_tol = 1e-9;
  int distinguished = 0;
  // Initial value of the non-distinguished sensors.
  ConsensusInit init = ConsensusInit::kIdentity;
  std::uint64_t init_seed = 0;
  // Label held by the distinguished sensor. Identity when unset.
  std::optional<Permutation> anchor_label;
  // Per-round accuracy in the trace (needs ground truth; costs one
  // assignment per sensor per round).
  bool trace_accuracy = false;
};

struct ConsensusState {
  RelaxedLabeling labels;
  int round = 0;
  double delta = 0.0;  // max-abs entry change of the last round
};

struct ConsensusTraceRow {
  int round;
  double delta;
  std::optional<double> accuracy;
};

struct ConsensusResult {
  RelaxedLabeling relaxed;
  int rounds = 0;
  bool converged = false;
  std::vector<ConsensusTraceRow> trace;
};

// Throws ConfigError on max_iters < 0, conv_tol <= 0 or a distinguished
// vertex outside [0, n).
void validate(const ConsensusConfig& cfg, int n);

ConsensusState initial_consensus_state(int n, int m,
                                       const ConsensusConfig& cfg);

// The update of one non-distinguished sensor. Neighbour contributions are
// summed in inbox order (ascending sender) after the sensor's own value.
Matrix consensus_node_update(int i, const Matrix& own, const Inbox& inbox,
                             const PairwiseAssociations& a);

// One synchronous round. The distinguished sensor is left unchanged.
ConsensusState consensus_step(const ConsensusState& state,
                              const PairwiseAssociations& a,
                              const SensorGraph& g, int distinguished);

// True iff every vertex is reachable from `root` along edge directions.
bool reaches_all(const SensorGraph& g, int root);

// Iterates consensus_step from initial_consensus_state until the round delta
// falls below conv_tol or max_iters rounds ran. Relaxed labels are returned
// unrounded; `converged` is false when the budget ran out. Throws ConfigError
// if the distinguished vertex does not reach every sensor.
ConsensusResult run_consensus(const PairwiseAssociations& a,
                              const SensorGraph& g, const ConsensusConfig& cfg,
                              const Labeling* truth = nullptr);

// Same iteration from an explicit starting state.
ConsensusResult run_consensus_from(ConsensusState state,
                                   const PairwiseAssociations& a,
                                   const SensorGraph& g,
                                   const ConsensusConfig& cfg,
                                   const Labeling* truth = nullptr);

// run_consensus executed through SyncNetwork; also returns the per-round
// communication statistics.
struct NetworkedConsensus {
  ConsensusResult result;
  std::vector<RoundStats> stats;
};
NetworkedConsensus run_consensus_networked(const PairwiseAssociations& a,
                                           const SensorGraph& g,
                                           const ConsensusConfig& cfg);

// Hungarian rounding: per sensor, the permutation maximizing <relaxed_i, P>.
Labeling round_labels(const RelaxedLabeling& relaxed);

// CSV with header "round,delta,accuracy" (accuracy empty when unknown).
void write_consensus_trace(std::ostream& out,
                           std::span<const ConsensusTraceRow> trace);

}  // namespace permsync

#endif  // PERMSYNC_CONSENSUS_H_
