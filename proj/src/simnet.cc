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

#include "permsync/simnet.h"

namespace permsync {

SyncNetwork::SyncNetwork(const SensorGraph& g) : graph_(g) {}

std::vector<Inbox> SyncNetwork::exchange(std::span<const Matrix> outgoing,
                                         std::string_view phase) {
  if (static_cast<int>(outgoing.size()) != graph_.size()) {
    throw DimensionError("exchange: one outgoing payload per node required");
  }
  RoundStats s;
  s.round = static_cast<int>(stats_.size());
  s.phase = std::string(phase);
  std::vector<Inbox> inboxes(graph_.size());
  for (int to = 0; to < graph_.size(); ++to) {
    for (int from : graph_.neighborhood(to)) {
      inboxes[to].push_back({from, &outgoing[from]});
      ++s.messages;
      s.scalars += static_cast<std::size_t>(outgoing[from].size());
    }
  }
  stats_.push_back(std::move(s));
  return inboxes;
}

void SyncNetwork::record_oracle_round(std::string_view phase) {
  RoundStats s;
  s.round = static_cast<int>(stats_.size());
  s.phase = std::string(phase);
  s.oracle = true;
  stats_.push_back(std::move(s));
}

std::vector<Inbox> local_views(const SensorGraph& g,
                               std::span<const Matrix> states) {
  std::vector<Inbox> inboxes(g.size());
  for (int to = 0; to < g.size(); ++to) {
    for (int from : g.neighborhood(to)) {
      inboxes[to].push_back({from, &states[from]});
    }
  }
  return inboxes;
}

std::size_t scalar_traffic(std::span<const RoundStats> stats) {
  std::size_t total = 0;
  for (const auto& s : stats) {
    if (!s.oracle) total += s.scalars;
  }
  return total;
}

void write_stats_csv(std::ostream& out, std::span<const RoundStats> stats) {
  out << "round,phase,messages,scalars,oracle\n";
  for (const auto& s : stats) {
    out << s.round << ',' << s.phase << ',' << s.messages << ',' << s.scalars
        << ',' << (s.oracle ? 1 : 0) << '\n';
  }
}

}  // namespace permsync
