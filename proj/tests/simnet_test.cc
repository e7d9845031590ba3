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

#include <sstream>

#include <gtest/gtest.h>

#include "permsync/consensus.h"
#include "test_support.h"

namespace permsync {
namespace {

using testing::complete_graph;

TEST(RunRounds, ZeroRoundsKeepsStates) {
  const SensorGraph g = complete_graph(3);
  const std::vector<Matrix> init = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0),
                                    Matrix::Constant(1, 1, 3.0)};
  const auto out = run_rounds<Matrix>(
      g, init, [](const Matrix& x) { return x; },
      [](int, const Matrix&, const Inbox&) -> Matrix { return Matrix::Zero(1, 1); }, 0);
  EXPECT_EQ(out.states, init);
  EXPECT_TRUE(out.stats.empty());
}

TEST(RunRounds, DeliveryFollowsEdgeDirection) {
  SensorGraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  // Each node adopts the sum of what it hears; values travel one hop per round.
  std::vector<Matrix> init(3, Matrix::Zero(1, 1));
  init[0](0, 0) = 1.0;
  const auto step = [](int, const Matrix& own, const Inbox& in) -> Matrix {
    Matrix x = own;
    for (const MessageView& m : in) x += *m.payload;
    return x;
  };
  const auto ident = [](const Matrix& x) { return x; };
  auto one = run_rounds<Matrix>(g, init, ident, step, 1);
  EXPECT_EQ(one.states[1](0, 0), 1.0);
  EXPECT_EQ(one.states[2](0, 0), 0.0);
  EXPECT_EQ(one.states[0](0, 0), 1.0);
  auto two = run_rounds<Matrix>(g, init, ident, step, 2);
  EXPECT_EQ(two.states[2](0, 0), 1.0);
  EXPECT_EQ(two.stats.size(), 2u);
  EXPECT_EQ(two.stats[1].messages, 2u);
}

TEST(SyncNetwork, InboxSortedBySender) {
  const SensorGraph g = complete_graph(5);
  SyncNetwork net(g);
  const std::vector<Matrix> out(5, Matrix::Identity(2, 2));
  const std::vector<Inbox> in = net.exchange(out, "x");
  for (int i = 0; i < 5; ++i) {
    ASSERT_EQ(in[i].size(), 4u);
    for (std::size_t k = 1; k < in[i].size(); ++k) {
      EXPECT_LT(in[i][k - 1].sender, in[i][k].sender);
    }
    for (const MessageView& m : in[i]) {
      EXPECT_NE(m.sender, i);
      EXPECT_EQ(m.payload, &out[m.sender]);
    }
  }
  EXPECT_THROW(net.exchange(std::vector<Matrix>(4)), DimensionError);
}

TEST(SyncNetwork, MessageCountOnCompleteDigraph) {
  const SensorGraph g = complete_graph(20);
  SyncNetwork net(g);
  net.exchange(std::vector<Matrix>(20, Matrix::Zero(3, 3)), "a");
  net.exchange(std::vector<Matrix>(20, Matrix::Zero(3, 3)), "b");
  ASSERT_EQ(net.stats().size(), 2u);
  for (const RoundStats& s : net.stats()) {
    EXPECT_EQ(s.messages, 380u);
    EXPECT_EQ(s.scalars, 380u * 9u);
  }
  EXPECT_EQ(net.stats()[1].round, 1);
  EXPECT_EQ(net.stats()[1].phase, "b");
}

TEST(Traffic, ConsensusRoundOnThreeNodes) {
  Rng rng(1);
  const SensorGraph g = complete_graph(3);
  const SyntheticInstance inst = generate_synthetic(g, 2, 0.0, rng);
  ConsensusConfig cfg;
  cfg.max_iters = 1;
  const NetworkedConsensus out = run_consensus_networked(inst.associations, g, cfg);
  EXPECT_EQ(scalar_traffic(out.stats), 24u);
}

TEST(Traffic, OracleRoundsExcluded) {
  const SensorGraph g = complete_graph(3);
  SyncNetwork net(g);
  net.exchange(std::vector<Matrix>(3, Matrix::Zero(2, 2)));
  net.record_oracle_round("gram");
  EXPECT_EQ(net.stats().size(), 2u);
  EXPECT_TRUE(net.stats()[1].oracle);
  EXPECT_EQ(scalar_traffic(net.stats()), 24u);
}

TEST(Stats, CsvLayout) {
  const std::vector<RoundStats> stats = {{0, "power", 6, 24, false}, {1, "gram", 0, 0, true}};
  std::ostringstream out;
  write_stats_csv(out, stats);
  EXPECT_EQ(out.str(),
            "round,phase,messages,scalars,oracle\n0,power,6,24,0\n1,gram,0,0,1\n");
}

}  // namespace
}  // namespace permsync
