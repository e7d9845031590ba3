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


#include "permsync/assoc.h"

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "permsync/oracle.h"
#include "test_support.h"

namespace permsync {
namespace {

using testing::complete_graph;
using testing::draw;
using testing::max_abs;

Permutation P(std::vector<int> v) { return Permutation(std::move(v)); }

Labeling random_labels(Rng& rng, int n, int m) {
  Labeling out;
  for (int i = 0; i < n; ++i) out.push_back(random_permutation(rng, m));
  return out;
}

TEST(Association, HardAndSoftProductsAgree) {
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const int m = draw(rng, 1, 8);
    const Permutation p = random_permutation(rng, m);
    const Matrix x = testing::random_matrix(rng, m, m);
    const Association hard = Association::hard(p);
    ASSERT_TRUE(hard.perm.has_value());
    Matrix out(m, m);
    apply_association(hard, x, out);
    EXPECT_EQ(out, matrix_of(p) * x);
    Matrix acc = x;
    accumulate_association(hard, x, acc);
    EXPECT_LT(max_abs(acc - (x + matrix_of(p) * x)), 1e-15);

    const Matrix ds = oracle::random_doubly_stochastic(rng, m, 3);
    Matrix soft_out(m, m);
    apply_association(Association::soft(ds), x, soft_out);
    EXPECT_LT(max_abs(soft_out - ds * x), 1e-14);
  }
}

TEST(Association, SoftDetectsPermutationMatrices) {
  EXPECT_TRUE(Association::soft(matrix_of(P({1, 0, 2}))).perm.has_value());
  EXPECT_FALSE(Association::soft(Matrix::Constant(2, 2, 0.5)).perm.has_value());
}

TEST(PairwiseAssociations, Validation) {
  PairwiseAssociations a(3, 2);
  EXPECT_THROW(a.set(0, 1, Association::soft(Matrix::Identity(3, 3))),
               DimensionError);
  Matrix bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  EXPECT_THROW(a.set(0, 1, Association::soft(bad)), DomainError);
  EXPECT_THROW(a.set(0, 0, Association::hard(Permutation(2))), Error);
  EXPECT_THROW(a.set(0, 5, Association::hard(Permutation(2))), Error);
  EXPECT_THROW(a.at(1, 2), Error);
}

TEST(PairwiseAssociations, ReciprocalStoresTranspose) {
  PairwiseAssociations a(2, 3);
  const Permutation p = P({2, 0, 1});
  a.set_reciprocal(0, 1, Association::hard(p));
  EXPECT_EQ(*a.at(1, 0).perm, inverse(p));
  EXPECT_EQ(a.at(1, 0).matrix, matrix_of(p).transpose());
  Rng rng(4);
  const Matrix ds = oracle::random_doubly_stochastic(rng, 3, 3);
  PairwiseAssociations b(2, 3);
  b.set_reciprocal(0, 1, Association::soft(ds));
  EXPECT_EQ(b.at(1, 0).matrix, ds.transpose());
  EXPECT_FALSE(b.all_hard());
  EXPECT_TRUE(a.all_hard());
}

TEST(CheckCoversGraph, MissingEntryThrows) {
  SensorGraph g(2);
  g.add_edge(0, 1);  // sensor 1 reads assoc(1, 0)
  PairwiseAssociations a(2, 2);
  a.set(0, 1, Association::hard(Permutation(2)));
  EXPECT_THROW(check_covers_graph(a, g), DimensionError);
  a.set(1, 0, Association::hard(Permutation(2)));
  EXPECT_NO_THROW(check_covers_graph(a, g));
}

TEST(PairwiseConsistency, InducedAssociationsAreConsistent) {
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const int n = draw(rng, 2, 6), m = draw(rng, 1, 7);
    const SensorGraph g = complete_graph(n);
    const PairwiseAssociations a = induced_associations(random_labels(rng, n, m), g);
    EXPECT_TRUE(check_pairwise_consistency(a, g).empty());
  }
}

// Three sensors, three targets; pi_12 swaps targets 2 and 3 while pi_23 and
// pi_13 are identities, so pi_12 o pi_23 (2) = 3 but pi_13 (2) = 2.
TEST(PairwiseConsistency, ThreeSensorSwapExample) {
  const SensorGraph g = complete_graph(3);
  PairwiseAssociations a(3, 3);
  a.set_reciprocal(0, 1, Association::hard(P({0, 2, 1})));
  a.set_reciprocal(1, 2, Association::hard(Permutation(3)));
  a.set_reciprocal(0, 2, Association::hard(Permutation(3)));
  const std::vector<Triple> bad = check_pairwise_consistency(a, g);
  EXPECT_NE(std::find(bad.begin(), bad.end(), Triple{0, 1, 2}), bad.end());
  EXPECT_EQ(compose(*a.at(0, 1).perm, *a.at(1, 2).perm)(1), 2);
  EXPECT_EQ((*a.at(0, 2).perm)(1), 1);
}

TEST(PairwiseConsistency, SingleCorruptedEdgeFlagsExactlyItsTriples) {
  Rng rng(9);
  const int n = 4, m = 5;
  const SensorGraph g = complete_graph(n);
  for (int a_ = 0; a_ < n; ++a_) {
    for (int b_ = a_ + 1; b_ < n; ++b_) {
      const Labeling truth = random_labels(rng, n, m);
      PairwiseAssociations a = induced_associations(truth, g);
      const Permutation exact = *a.at(a_, b_).perm;
      a.set_reciprocal(a_, b_, Association::hard(corrupt_permutation(exact, 1.0, rng)));
      std::set<Triple> expected;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            if (i == j || j == k || i == k) continue;
            const std::set<std::pair<int, int>> pairs = {
                {std::min(i, j), std::max(i, j)},
                {std::min(j, k), std::max(j, k)},
                {std::min(i, k), std::max(i, k)}};
            if (pairs.contains({a_, b_})) expected.insert({i, j, k});
          }
        }
      }
      const std::vector<Triple> bad = check_pairwise_consistency(a, g);
      EXPECT_EQ(std::set<Triple>(bad.begin(), bad.end()), expected);
      EXPECT_TRUE(std::is_sorted(bad.begin(), bad.end()));
    }
  }
}

TEST(PairwiseConsistency, SoftInputIsRejected) {
  PairwiseAssociations a(3, 2);
  const SensorGraph g = complete_graph(3);
  a.set_reciprocal(0, 1, Association::soft(Matrix::Constant(2, 2, 0.5)));
  a.set_reciprocal(1, 2, Association::hard(Permutation(2)));
  a.set_reciprocal(0, 2, Association::hard(Permutation(2)));
  EXPECT_THROW(check_pairwise_consistency(a, g), DomainError);
}

TEST(LabelConsistency, TruthShiftedTruthAndPerturbation) {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const int n = draw(rng, 2, 6), m = draw(rng, 2, 7);
    const Labeling truth = random_labels(rng, n, m);
    const PairwiseAssociations a = induced_associations(truth, complete_graph(n));
    EXPECT_TRUE(check_label_consistency(truth, a));
    const Permutation shift = random_permutation(rng, m);
    Labeling moved;
    for (const Permutation& p : truth) moved.push_back(compose(p, shift));
    EXPECT_TRUE(check_label_consistency(moved, a));
    Labeling broken = truth;
    const int victim = draw(rng, 0, n - 1);
    broken[victim] = compose(broken[victim], corrupt_permutation(Permutation(m), 1.0, rng));
    EXPECT_FALSE(check_label_consistency(broken, a));
  }
  EXPECT_THROW(check_label_consistency(random_labels(rng, 2, 3),
                                       PairwiseAssociations(3, 3)),
               DimensionError);
}

TEST(CorruptPermutation, ChangesExactlyTheSelectedCount) {
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    const int m = draw(rng, 1, 30);
    const double p = uniform_real(rng);
    const Permutation exact = random_permutation(rng, m);
    const int chosen = static_cast<int>(std::ceil(p * m - 1e-9));
    const int expected = chosen < 2 ? 0 : chosen;
    EXPECT_EQ(perm_distance(corrupt_permutation(exact, p, rng), exact), expected);
  }
  EXPECT_THROW(corrupt_permutation(Permutation(3), 1.5, rng), ConfigError);
}

TEST(GenerateSynthetic, NoiselessIsInduced) {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const int n = draw(rng, 2, 7);
    const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
    const SyntheticInstance inst = generate_synthetic(g, draw(rng, 1, 6), 0.0, rng);
    EXPECT_TRUE(check_pairwise_consistency(inst.associations, g).empty());
    EXPECT_TRUE(check_label_consistency(inst.truth, inst.associations));
  }
}

TEST(GenerateSynthetic, FullCorruptionMissesEveryEntry) {
  Rng rng(19);
  const SensorGraph g = complete_graph(5);
  const SyntheticInstance inst = generate_synthetic(g, 6, 1.0, rng);
  for (const auto& [key, assoc] : inst.associations.entries()) {
    const Permutation exact =
        compose(inst.truth[key.first], inverse(inst.truth[key.second]));
    EXPECT_EQ(perm_distance(*assoc.perm, exact), 6);
  }
}

TEST(GenerateSynthetic, ErrorRateMatchesFraction) {
  Rng rng(23);
  const SensorGraph g = complete_graph(15);  // 105 pairs
  const SyntheticInstance inst = generate_synthetic(g, 50, 0.4, rng);
  int edges = 0;
  for (const auto& [key, assoc] : inst.associations.entries()) {
    if (key.first > key.second || ++edges > 100) continue;
    const Permutation exact =
        compose(inst.truth[key.first], inverse(inst.truth[key.second]));
    const double rate = perm_distance(*assoc.perm, exact) / 50.0;
    EXPECT_GE(rate, 0.38);
    EXPECT_LE(rate, 0.42);
  }
  EXPECT_GE(edges, 100);
}

TEST(GenerateSynthetic, ReciprocalAndDeterministic) {
  Rng a(29), b(29);
  const SensorGraph g = complete_graph(4);
  const SyntheticInstance x = generate_synthetic(g, 5, 0.5, a);
  const SyntheticInstance y = generate_synthetic(g, 5, 0.5, b);
  EXPECT_EQ(x.truth, y.truth);
  for (const auto& [key, assoc] : x.associations.entries()) {
    EXPECT_EQ(*assoc.perm, *y.associations.at(key.first, key.second).perm);
    EXPECT_EQ(*assoc.perm, inverse(*x.associations.at(key.second, key.first).perm));
  }
}

TEST(Accuracy, Examples) {
  Rng rng(31);
  const Labeling truth = random_labels(rng, 10, 6);
  EXPECT_EQ(accuracy(truth, truth), 1.0);
  const Permutation shift = random_permutation(rng, 6);
  Labeling moved;
  for (const Permutation& p : truth) moved.push_back(compose(p, shift));
  EXPECT_EQ(accuracy(moved, truth), 1.0);
  Labeling one_off = truth;
  one_off[4] = compose(one_off[4], corrupt_permutation(Permutation(6), 1.0, rng));
  EXPECT_DOUBLE_EQ(accuracy(one_off, truth), 0.9);
  EXPECT_THROW(accuracy(truth, random_labels(rng, 3, 6)), DimensionError);
}

TEST(Accuracy, InvariantUnderCommonShift) {
  Rng rng(37);
  for (int k = 0; k < 30; ++k) {
    const int n = draw(rng, 2, 6), m = draw(rng, 2, 6);
    const Labeling truth = random_labels(rng, n, m);
    const Labeling guess = random_labels(rng, n, m);
    const Permutation shift = random_permutation(rng, m);
    Labeling moved;
    for (const Permutation& p : guess) moved.push_back(compose(p, shift));
    EXPECT_DOUBLE_EQ(accuracy(moved, truth), accuracy(guess, truth));
  }
}

TEST(BlockMatrix, Examples) {
  const PairwiseAssociations one(1, 3);
  EXPECT_EQ(build_block_matrix(one, SensorGraph(1)), Matrix::Identity(3, 3));

  Rng rng(41);
  const int m = 4;
  const SensorGraph g2 = complete_graph(2);
  const PairwiseAssociations a2 = induced_associations(random_labels(rng, 2, m), g2);
  const Matrix p2 = build_block_matrix(a2, g2);
  EXPECT_EQ(p2.block(0, m, m, m), a2.at(0, 1).matrix);
  EXPECT_EQ(p2.block(m, 0, m, m), a2.at(0, 1).matrix.transpose());
  const oracle::SymEigen eig = oracle::sym_eigen(p2);
  for (int k = 0; k < m; ++k) EXPECT_NEAR(eig.values(k), 2.0, 1e-10);
  EXPECT_NEAR(eig.values(m), 0.0, 1e-10);
}

TEST(BlockMatrix, MissingEdgesGiveZeroBlocks) {
  const SensorGraph g = testing::path_graph(3);
  Rng rng(43);
  const PairwiseAssociations a = induced_associations(random_labels(rng, 3, 2), g);
  const Matrix p = build_block_matrix(a, g);
  EXPECT_EQ(p.block(0, 4, 2, 2), Matrix::Zero(2, 2));
  EXPECT_EQ(p.block(4, 0, 2, 2), Matrix::Zero(2, 2));
  EXPECT_EQ(p.block(2, 0, 2, 2), a.at(1, 0).matrix);
  EXPECT_EQ(p.block(0, 2, 2, 2), Matrix::Zero(2, 2));  // 1 -> 0 is not an edge
}

TEST(BlockMatrix, ConsistentCompleteGraphSpectrum) {
  Rng rng(47);
  for (int k = 0; k < 15; ++k) {
    const int n = draw(rng, 2, 6), m = draw(rng, 1, 6);
    const SensorGraph g = complete_graph(n);
    const Labeling truth = random_labels(rng, n, m);
    const Matrix p = build_block_matrix(induced_associations(truth, g), g);
    EXPECT_EQ(p, p.transpose());
    const oracle::SymEigen eig = oracle::sym_eigen(p);
    EXPECT_NEAR(eig.values(0), n, 1e-9);
    EXPECT_NEAR(eig.values(m - 1), n, 1e-9);
    EXPECT_EQ(numerical_rank(p, 1e-9 * n * m), m);
    // P = X X^T with X the stacked ground truth.
    const Matrix x = oracle::stack(to_matrices(truth));
    EXPECT_LT(max_abs(p - x * x.transpose()), 1e-12);
  }
}

TEST(BlockMatrix, SymmetricUnderReciprocity) {
  Rng rng(53);
  const SensorGraph g = gen_graph(GraphKind::kRandomSubset, 6, 0.5, rng);
  const SyntheticInstance inst = generate_synthetic(g, 4, 0.5, rng);
  const Matrix p = build_block_matrix(inst.associations, g);
  EXPECT_EQ(p, p.transpose());
}

TEST(DagPropagation, IsolatedSensorsGiveIdentity) {
  EXPECT_EQ(build_dag_propagation(PairwiseAssociations(3, 2), SensorGraph(3)),
            Matrix::Identity(6, 6));
}

TEST(DagPropagation, NoiselessFactorisation) {
  Rng rng(59);
  for (int k = 0; k < 15; ++k) {
    const int n = draw(rng, 2, 6), m = draw(rng, 1, 5);
    const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
    const SyntheticInstance inst = generate_synthetic(g, m, 0.0, rng);
    const Matrix f = build_dag_propagation(inst.associations, g);
    EXPECT_LT((f.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    Matrix pi0 = Matrix::Zero(n * m, n * m);
    for (int i = 0; i < n; ++i) {
      pi0.block(i * m, i * m, m, m) = matrix_of(inst.truth[i]);
    }
    const Matrix fg = build_matrices(g).propagation;
    Matrix kron = Matrix::Zero(n * m, n * m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        kron.block(i * m, j * m, m, m) = fg(i, j) * Matrix::Identity(m, m);
      }
    }
    EXPECT_LT(max_abs(f - pi0 * kron * pi0.transpose()), 1e-12);
  }
}

TEST(DataAssociationGraph, EdgesFollowPositiveEntries) {
  Rng rng(61);
  const SensorGraph g = complete_graph(3);
  const SyntheticInstance inst = generate_synthetic(g, 4, 0.0, rng);
  const std::vector<DagEdge> edges = data_association_edges(inst.associations);
  EXPECT_EQ(edges.size(), 6u * 4u);
  for (const DagEdge& e : edges) {
    EXPECT_EQ(e.weight, 1.0);
    EXPECT_EQ(inst.associations.at(e.from_sensor, e.to_sensor)
                  .matrix(e.from_target, e.to_target),
              1.0);
  }
  PairwiseAssociations soft(2, 2);
  Matrix x(2, 2);
  x << 0.25, 0.75, 0.75, 0.25;
  soft.set_reciprocal(0, 1, Association::soft(x));
  EXPECT_EQ(data_association_edges(soft).size(), 8u);
}

TEST(JointObjective, TruthAttainsTheMaximum) {
  Rng rng(67);
  for (int k = 0; k < 10; ++k) {
    const int n = draw(rng, 2, 6), m = draw(rng, 1, 6);
    const SensorGraph g = random_rooted_digraph(n, 0.4, 0, false, rng);
    const SyntheticInstance inst = generate_synthetic(g, m, 0.0, rng);
    EXPECT_EQ(joint_objective(inst.truth, inst.associations, g),
              static_cast<double>(m) * g.edge_count());
    // Dense trace form agrees with the indexed sum.
    const Labeling guess = random_labels(rng, n, m);
    double dense = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j : g.neighborhood(i)) {
        dense += (matrix_of(guess[i]).transpose() *
                  inst.associations.at(i, j).matrix * matrix_of(guess[j]))
                     .trace();
      }
    }
    EXPECT_DOUBLE_EQ(joint_objective(guess, inst.associations, g), dense);
  }
}

}  // namespace
}  // namespace permsync
