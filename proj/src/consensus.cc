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

#include "permsync/consensus.h"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <string>

#include "permsync/assign.h"

namespace permsync {

void validate(const ConsensusConfig& cfg, int n) {
  if (cfg.max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (!(cfg.conv_tol > 0.0)) throw ConfigError("conv_tol must be positive");
  if (cfg.distinguished < 0 || cfg.distinguished >= n) {
    throw ConfigError("distinguished vertex out of range");
  }
}

ConsensusState initial_consensus_state(int n, int m,
                                       const ConsensusConfig& cfg) {
  validate(cfg, n);
  ConsensusState s;
  s.labels.reserve(n);
  Rng rng(cfg.init_seed);
  for (int i = 0; i < n; ++i) {
    if (i == cfg.distinguished) {
      const Permutation anchor = cfg.anchor_label.value_or(Permutation(m));
      if (anchor.size() != m) {
        throw DimensionError("anchor label size differs from target count");
      }
      s.labels.push_back(matrix_of(anchor));
      continue;
    }
    switch (cfg.init) {
      case ConsensusInit::kIdentity:
        s.labels.push_back(Matrix::Identity(m, m));
        break;
      case ConsensusInit::kUniform:
        s.labels.push_back(Matrix::Constant(m, m, 1.0 / m));
        break;
      case ConsensusInit::kRandomPermutation:
        s.labels.push_back(matrix_of(random_permutation(rng, m)));
        break;
    }
  }
  return s;
}

Matrix consensus_node_update(int i, const Matrix& own, const Inbox& inbox,
                             const PairwiseAssociations& a) {
  Matrix next = own;
  for (const MessageView& msg : inbox) {
    accumulate_association(a.at(i, msg.sender), *msg.payload, next);
  }
  next /= static_cast<double>(inbox.size() + 1);
  return next;
}

namespace {

double max_abs_change(const RelaxedLabeling& before,
                      const RelaxedLabeling& after) {
  double delta = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    delta = std::max(delta, (after[i] - before[i]).cwiseAbs().maxCoeff());
  }
  return delta;
}

ConsensusState advance(const ConsensusState& state,
                       const std::vector<Inbox>& inboxes,
                       const PairwiseAssociations& a, int distinguished) {
  ConsensusState next;
  next.round = state.round + 1;
  next.labels.reserve(state.labels.size());
  for (std::size_t i = 0; i < state.labels.size(); ++i) {
    if (static_cast<int>(i) == distinguished) {
      next.labels.push_back(state.labels[i]);
    } else {
      next.labels.push_back(consensus_node_update(static_cast<int>(i),
                                                  state.labels[i], inboxes[i],
                                                  a));
    }
  }
  next.delta = max_abs_change(state.labels, next.labels);
  return next;
}

std::optional<double> maybe_accuracy(const RelaxedLabeling& labels,
                                     const Labeling* truth,
                                     const ConsensusConfig& cfg) {
  if (!truth || !cfg.trace_accuracy) return std::nullopt;
  return accuracy(round_labels(labels), *truth, cfg.distinguished);
}

void check_dimensions(const ConsensusState& state,
                      const PairwiseAssociations& a, const SensorGraph& g) {
  if (static_cast<int>(state.labels.size()) != g.size()) {
    throw DimensionError("consensus: one label per sensor required");
  }
  for (const Matrix& x : state.labels) {
    if (x.rows() != a.targets() || x.cols() != a.targets()) {
      throw DimensionError("consensus: label size differs from target count");
    }
  }
  check_covers_graph(a, g);
}

}  // namespace

ConsensusState consensus_step(const ConsensusState& state,
                              const PairwiseAssociations& a,
                              const SensorGraph& g, int distinguished) {
  check_dimensions(state, a, g);
  return advance(state, local_views(g, state.labels), a, distinguished);
}

bool reaches_all(const SensorGraph& g, int root) {
  std::vector<bool> seen(g.size(), false);
  std::deque<int> queue{root};
  seen[root] = true;
  int count = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : g.out_neighbors(v)) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        queue.push_back(w);
      }
    }
  }
  return count == g.size();
}

ConsensusResult run_consensus(const PairwiseAssociations& a,
                              const SensorGraph& g, const ConsensusConfig& cfg,
                              const Labeling* truth) {
  return run_consensus_from(initial_consensus_state(g.size(), a.targets(), cfg),
                            a, g, cfg, truth);
}

ConsensusResult run_consensus_from(ConsensusState state,
                                   const PairwiseAssociations& a,
                                   const SensorGraph& g,
                                   const ConsensusConfig& cfg,
                                   const Labeling* truth) {
  validate(cfg, g.size());
  check_dimensions(state, a, g);
  if (!reaches_all(g, cfg.distinguished)) {
    throw ConfigError("distinguished vertex does not reach every sensor");
  }
  ConsensusResult out;
  if (g.size() == 1) {
    out.converged = true;
  }
  while (!out.converged && state.round < cfg.max_iters) {
    state = advance(state, local_views(g, state.labels), a, cfg.distinguished);
    out.trace.push_back(
        {state.round, state.delta, maybe_accuracy(state.labels, truth, cfg)});
    out.converged = state.delta < cfg.conv_tol;
  }
  out.rounds = state.round;
  out.relaxed = std::move(state.labels);
  return out;
}

NetworkedConsensus run_consensus_networked(const PairwiseAssociations& a,
                                           const SensorGraph& g,
                                           const ConsensusConfig& cfg) {
  ConsensusState state = initial_consensus_state(g.size(), a.targets(), cfg);
  check_dimensions(state, a, g);
  if (!reaches_all(g, cfg.distinguished)) {
    throw ConfigError("distinguished vertex does not reach every sensor");
  }
  SyncNetwork net(g);
  NetworkedConsensus out;
  out.result.converged = g.size() == 1;
  while (!out.result.converged && state.round < cfg.max_iters) {
    const std::vector<Inbox> inboxes = net.exchange(state.labels, "consensus");
    state = advance(state, inboxes, a, cfg.distinguished);
    out.result.trace.push_back({state.round, state.delta, std::nullopt});
    out.result.converged = state.delta < cfg.conv_tol;
  }
  out.result.rounds = state.round;
  out.result.relaxed = std::move(state.labels);
  out.stats = net.stats();
  return out;
}

Labeling round_labels(const RelaxedLabeling& relaxed) {
  Labeling out;
  out.reserve(relaxed.size());
  for (const Matrix& x : relaxed) out.push_back(solve_assignment(x));
  return out;
}

void write_consensus_trace(std::ostream& out,
                           std::span<const ConsensusTraceRow> trace) {
  out << "round,delta,accuracy\n";
  char buf[64];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", row.delta);
    out << row.round << ',' << buf << ',';
    if (row.accuracy) {
      std::snprintf(buf, sizeof buf, "%.17g", *row.accuracy);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace permsync
