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

// Pairwise associations between sensors, consistency checks, the synthetic
// outlier model and the accuracy metric.
//
// Conventions. assoc(i, j) is the matrix of the estimated association
// pi_ij, which maps target indices of sensor j to those of sensor i. For
// consistent labels pi_i it equals P_i P_j^T. Sensor i reads assoc(i, j)
// for each in-neighbour j, i.e. for each graph edge (j, i).

#ifndef PERMSYNC_ASSOC_H_
#define PERMSYNC_ASSOC_H_

#include <map>
#include <optional>
#include <vector>

#include "permsync/common.h"
#include "permsync/graph.h"
#include "permsync/perm.h"

namespace permsync {

// One measured association. `perm` is set iff `matrix` is a permutation
// matrix; products then reduce to row shuffles.
struct Association {
  Matrix matrix;
  std::optional<Permutation> perm;

  static Association hard(const Permutation& p);
  static Association soft(Matrix m);
};

// out = A * x, exploiting permutation structure when available.
void apply_association(const Association& a, const Matrix& x, Matrix& out);
// out += A * x.
void accumulate_association(const Association& a, const Matrix& x,
                            Matrix& out);

class PairwiseAssociations {
 public:
  PairwiseAssociations(int n, int m);

  int sensors() const { return n_; }
  int targets() const { return m_; }

  // Stores the association for ordered pair (i, j). Throws DimensionError on
  // a wrong shape and DomainError if the matrix is not row-stochastic.
  void set(int i, int j, Association a);
  // Sets (i, j) and the transpose on (j, i).
  void set_reciprocal(int i, int j, const Association& a);

  bool contains(int i, int j) const { return data_.contains({i, j}); }
  const Association& at(int i, int j) const;
  const std::map<std::pair<int, int>, Association>& entries() const {
    return data_;
  }

  // True iff every stored association is a permutation.
  bool all_hard() const;

 private:
  int n_;
  int m_;
  std::map<std::pair<int, int>, Association> data_;
};

// Throws DimensionError unless every pair (i, j) with (j, i) in g carries an
// association of the right size.
void check_covers_graph(const PairwiseAssociations& a, const SensorGraph& g);

using Labeling = std::vector<Permutation>;
using RelaxedLabeling = std::vector<Matrix>;

RelaxedLabeling to_matrices(const Labeling& labels);

struct Triple {
  int i, j, k;
  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Ordered triples of distinct sensors whose associations (i,j), (j,k), (i,k)
// are all stored and violate pi_ij o pi_jk = pi_ik. Sorted ascending. Only the
// associations required by `g` (see check_covers_graph) are considered.
// Throws DomainError if a considered association is not a permutation.
std::vector<Triple> check_pairwise_consistency(const PairwiseAssociations& a,
                                               const SensorGraph& g);

// True iff pi_ij = pi_i o pi_j^-1 for every stored association.
bool check_label_consistency(const Labeling& labels,
                             const PairwiseAssociations& a);

// Labels P_i P_j^T for every pair required by `g`, both directions.
PairwiseAssociations induced_associations(const Labeling& truth,
                                          const SensorGraph& g);

// Rotates the images of ceil(fraction * m) uniformly chosen indices of `p`
// by a uniformly drawn non-zero shift. Every chosen index changes image when
// at least two are chosen.
Permutation corrupt_permutation(const Permutation& p, double fraction,
                                Rng& rng);

struct SyntheticInstance {
  PairwiseAssociations associations;
  Labeling truth;
};

// Uniform ground-truth labels; for every sensor pair joined by an edge in
// either direction the true association is corrupted independently with
// corrupt_permutation, and the reverse direction stores the transpose.
SyntheticInstance generate_synthetic(const SensorGraph& g, int m,
                                     double outlier_fraction, Rng& rng);

// Fraction of correct labels after removing the global ambiguity: the
// permutation Q maximizing <labels[anchor] Q, truth[anchor]> is found with
// solve_assignment and applied on the right of every label.
double accuracy(const Labeling& labels, const Labeling& truth, int anchor = 0);

// nm x nm matrix with identity diagonal blocks, block (i, j) = assoc(i, j)
// when (j, i) is a graph edge and zero otherwise.
Matrix build_block_matrix(const PairwiseAssociations& a, const SensorGraph& g);

// Propagation matrix of the data association graph: block row i is
// (I at i, assoc(i, j) at each in-neighbour j) / (|N_i| + 1).
Matrix build_dag_propagation(const PairwiseAssociations& a,
                             const SensorGraph& g);

// Weighted edge list of the data association graph: an edge from (i, k) to
// (j, l) for each stored (i, j) with [assoc(i, j)]_kl > 0.
struct DagEdge {
  int from_sensor, from_target, to_sensor, to_target;
  double weight;
};
std::vector<DagEdge> data_association_edges(const PairwiseAssociations& a);

// Objective sum over required pairs of trace(P_i^T assoc(i, j) P_j).
double joint_objective(const Labeling& labels, const PairwiseAssociations& a,
                       const SensorGraph& g);

}  // namespace permsync

#endif  // PERMSYNC_ASSOC_H_
