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

// Permutations of {0..m-1}, their matrix representation and the doubly
// stochastic matrices that relax them.

#ifndef PERMSYNC_PERM_H_
#define PERMSYNC_PERM_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permsync/common.h"

namespace permsync {

inline constexpr double kDoublyStochasticTol = 1e-9;

// A bijection on {0..m-1}. image(l) is the value the permutation maps l to.
class Permutation {
 public:
  // Identity on m elements.
  explicit Permutation(int m);
  // Throws DomainError unless `images` is a bijection of {0..size-1}.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int m) { return Permutation(m); }

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int l) const { return map_[l]; }
  int image(int l) const { return map_[l]; }
  std::span<const int> images() const { return map_; }
  bool is_identity() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> map_;
};

// (p o q)(l) = p(q(l)).
Permutation compose(const Permutation& p, const Permutation& q);
Permutation inverse(const Permutation& p);

// Column j of the result is e_{p(j)}.
Matrix matrix_of(const Permutation& p);

// Recovers the permutation represented by a 0/1 matrix. nullopt if `m` is not
// a permutation matrix (entries compared exactly against 0 and 1).
std::optional<Permutation> permutation_of(const Matrix& m);

// Number of labels on which p1 and p2 differ, i.e. m - <P1, P2>.
int perm_distance(const Permutation& p1, const Permutation& p2);

// <A, B> = trace(A^T B).
double frobenius_inner(const Matrix& a, const Matrix& b);

// Nonnegative within -tol, row and column sums within tol of 1.
bool is_doubly_stochastic(const Matrix& m, double tol = kDoublyStochasticTol);
// Same test without the column sums.
bool is_row_stochastic(const Matrix& m, double tol = kDoublyStochasticTol);

// Throws DomainError on NaN/Inf, DimensionError if not square.
void check_square_finite(const Matrix& m, std::string_view what);

// Uniform draw via Fisher-Yates; deterministic for a given engine state.
Permutation random_permutation(Rng& rng, int m);

// Text form: whitespace separated 1-based images, e.g. "2 3 1".
std::string format_permutation(const Permutation& p);
// Inverse of format_permutation. Throws DomainError on malformed input.
Permutation parse_permutation(std::string_view line);

}  // namespace permsync

#endif  // PERMSYNC_PERM_H_
