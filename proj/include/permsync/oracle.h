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

// Centralized and exhaustive reference computations. Nothing in the
// protocol code depends on this library; tests and `permsync verify` use it
// to check the protocols against independent routes.

#ifndef PERMSYNC_ORACLE_H_
#define PERMSYNC_ORACLE_H_

#include <vector>

#include "permsync/assoc.h"
#include "permsync/common.h"
#include "permsync/graph.h"
#include "permsync/perm.h"

namespace permsync::oracle {

struct SymEigen {
  Vector values;   // descending
  Matrix vectors;  // column k belongs to values(k)
};

// Cyclic Jacobi rotations. Throws DomainError if s is not symmetric to 1e-8.
SymEigen sym_eigen(const Matrix& s);

// Orthogonal iteration Y = P Q, Y = Q R with Householder QR, signs fixed so
// diag(R) > 0 (the same R a Cholesky factorisation of Y^T Y produces).
// Returns Q after each iteration; element 0 is the orthonormalized init.
// Throws RankDeficiencyError when an iterate loses rank.
std::vector<Matrix> centralized_oi(const Matrix& p, const Matrix& init,
                                   int iters);

// Orthonormal basis of the column span with positive-diagonal R.
Matrix orthonormalize(const Matrix& y);

// F^k for k a power of two, by repeated squaring. Throws DomainError
// otherwise.
Matrix power_limit(const Matrix& f, long long k);

// sin of the largest principal angle between the column spans.
double subspace_distance(const Matrix& a, const Matrix& b);

// Exhaustive assignment: lexicographically first permutation maximizing
// sum_l w(pi(l), l). m <= 8.
Permutation brute_force_assignment(const Matrix& w);

struct JointOptimum {
  Labeling labels;
  double objective;
};

// Maximizes joint_objective over all labelings with labels[anchor] = id.
// Requires n <= 4 and m <= 4; throws DomainError otherwise.
JointOptimum brute_force_labels(const PairwiseAssociations& a,
                                const SensorGraph& g, int anchor = 0);

// Convex combination of `terms` uniformly drawn permutation matrices with
// random positive weights; doubly stochastic by construction.
Matrix random_doubly_stochastic(Rng& rng, int m, int terms);

// Stacks blocks vertically into an (n*m) x m matrix.
Matrix stack(const RelaxedLabeling& blocks);
RelaxedLabeling unstack(const Matrix& stacked, int m);

}  // namespace permsync::oracle

#endif  // PERMSYNC_ORACLE_H_
