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

#include "permsync/assign.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace permsync {
namespace {

struct DualSolution {
  std::vector<int> row_of_col;  // 0-based
  std::vector<double> u;        // row potentials, 1-based
  std::vector<double> v;        // column potentials, 1-based
};

// Shortest augmenting path Hungarian method on a square cost matrix
// (minimization). Keeps u[i] + v[j] <= cost(i, j) for every pair, with
// equality on the returned matching.
DualSolution hungarian_min(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<bool> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  DualSolution out;
  out.row_of_col.resize(n);
  for (int j = 1; j <= n; ++j) out.row_of_col[j - 1] = p[j] - 1;
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

// Lexicographic minimisation over the perfect matchings of the tight
// (equality) subgraph. Every optimal assignment uses tight edges only, so
// this picks the smallest image sequence among the optimal ones.
class LexMatcher {
 public:
  LexMatcher(std::vector<std::vector<int>> tight_rows,
             std::vector<int> row_of_col)
      : tight_rows_(std::move(tight_rows)),
        row_of_col_(std::move(row_of_col)),
        col_of_row_(row_of_col_.size()),
        fixed_row_(row_of_col_.size(), false),
        visited_(row_of_col_.size()) {
    for (std::size_t c = 0; c < row_of_col_.size(); ++c) {
      col_of_row_[row_of_col_[c]] = static_cast<int>(c);
    }
  }

  std::vector<int> run() {
    const int m = static_cast<int>(row_of_col_.size());
    for (int col = 0; col < m; ++col) {
      for (int r : tight_rows_[col]) {
        if (r >= row_of_col_[col]) break;
        if (fixed_row_[r]) continue;
        if (try_reroute(col, r)) break;
      }
      fixed_row_[row_of_col_[col]] = true;
    }
    return row_of_col_;
  }

 private:
  // Forces col -> r and tries to rematch the column that held r using the
  // row col gives up. Rows of earlier columns are frozen.
  bool try_reroute(int col, int r) {
    const int displaced = col_of_row_[r];
    const int freed = row_of_col_[col];
    const std::vector<int> saved_rows = row_of_col_;
    const std::vector<int> saved_cols = col_of_row_;
    row_of_col_[col] = r;
    col_of_row_[r] = col;
    col_of_row_[freed] = -1;
    row_of_col_[displaced] = -1;
    std::fill(visited_.begin(), visited_.end(), false);
    visited_[r] = true;
    if (augment(displaced, col)) return true;
    row_of_col_ = saved_rows;
    col_of_row_ = saved_cols;
    return false;
  }

  bool augment(int c, int locked_col) {
    for (int r : tight_rows_[c]) {
      if (visited_[r] || fixed_row_[r]) continue;
      visited_[r] = true;
      const int owner = col_of_row_[r];
      if (owner == locked_col) continue;
      if (owner == -1 || augment(owner, locked_col)) {
        row_of_col_[c] = r;
        col_of_row_[r] = c;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<int>> tight_rows_;
  std::vector<int> row_of_col_;
  std::vector<int> col_of_row_;
  std::vector<bool> fixed_row_;
  std::vector<bool> visited_;
};

}  // namespace

Permutation solve_assignment(const Matrix& profit) {
  check_square_finite(profit, "solve_assignment");
  const int m = static_cast<int>(profit.rows());
  if (m == 0) throw DimensionError("solve_assignment: empty matrix");

  const Matrix cost = -profit;
  DualSolution dual = hungarian_min(cost);

  const double scale = std::max(1.0, profit.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  std::vector<std::vector<int>> tight(m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < m; ++r) {
      const double reduced = cost(r, c) - dual.u[r + 1] - dual.v[c + 1];
      if (reduced <= tol) tight[c].push_back(r);
    }
  }
  LexMatcher matcher(std::move(tight), std::move(dual.row_of_col));
  return Permutation(matcher.run());
}

double assignment_objective(const Matrix& profit, const Permutation& pi) {
  if (profit.rows() != pi.size() || profit.cols() != pi.size()) {
    throw DimensionError("assignment_objective: size mismatch");
  }
  double total = 0.0;
  for (int l = 0; l < pi.size(); ++l) total += profit(pi(l), l);
  return total;
}

}  // namespace permsync
