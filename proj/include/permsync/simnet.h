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

// Synchronous message passing over a SensorGraph.
//
// Each round every node broadcasts one dense matrix along its out-edges; a
// node's next state is computed from its own state and its inbox only. The
// round barrier is strict: messages produced in round t are read in round t
// and discarded afterwards.

#ifndef PERMSYNC_SIMNET_H_
#define PERMSYNC_SIMNET_H_

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permsync/common.h"
#include "permsync/graph.h"

namespace permsync {

// A delivered message. `payload` points into the sender's outbox and is valid
// until the next exchange.
struct MessageView {
  int sender;
  const Matrix* payload;
};

// Messages for one node, ordered by sender id.
using Inbox = std::vector<MessageView>;

struct RoundStats {
  int round = 0;
  std::string phase;
  std::size_t messages = 0;
  std::size_t scalars = 0;  // matrix entries transmitted
  // Set for rounds whose result was computed centrally instead of exchanged.
  // Such rounds are excluded from scalar_traffic.
  bool oracle = false;
};

class SyncNetwork {
 public:
  explicit SyncNetwork(const SensorGraph& g);

  // Delivers outgoing[i] to every out-neighbour of i and records one
  // RoundStats entry. outgoing.size() must equal the node count.
  std::vector<Inbox> exchange(std::span<const Matrix> outgoing,
                              std::string_view phase = {});

  // Records a round that a centralized shortcut replaced.
  void record_oracle_round(std::string_view phase);

  const SensorGraph& graph() const { return graph_; }
  const std::vector<RoundStats>& stats() const { return stats_; }

 private:
  const SensorGraph& graph_;
  std::vector<RoundStats> stats_;
};

// Inboxes a node would receive if `states` were broadcast, without
// accounting. Used by the direct (non-networked) protocol implementations.
std::vector<Inbox> local_views(const SensorGraph& g,
                               std::span<const Matrix> states);

// Sum of payload entries over the non-oracle rounds.
std::size_t scalar_traffic(std::span<const RoundStats> stats);

// CSV with header "round,phase,messages,scalars,oracle".
void write_stats_csv(std::ostream& out, std::span<const RoundStats> stats);

template <class State>
struct RoundsResult {
  std::vector<State> states;
  std::vector<RoundStats> stats;
};

// Generic driver: each round, payload(state_i) is broadcast and
// update(i, state_i, inbox_i) produces the next state.
template <class State>
RoundsResult<State> run_rounds(
    const SensorGraph& g, std::vector<State> states,
    const std::function<Matrix(const State&)>& payload,
    const std::function<State(int, const State&, const Inbox&)>& update,
    int rounds) {
  if (static_cast<int>(states.size()) != g.size()) {
    throw DimensionError("run_rounds: one state per node required");
  }
  SyncNetwork net(g);
  std::vector<Matrix> outbox(states.size());
  for (int t = 0; t < rounds; ++t) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      outbox[i] = payload(states[i]);
    }
    const std::vector<Inbox> inboxes = net.exchange(outbox);
    std::vector<State> next;
    next.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      next.push_back(update(static_cast<int>(i), states[i], inboxes[i]));
    }
    states = std::move(next);
  }
  return {std::move(states), net.stats()};
}

}  // namespace permsync

#endif  // PERMSYNC_SIMNET_H_
