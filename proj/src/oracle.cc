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

#include "permsync/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace permsync::oracle {

SymEigen sym_eigen(const Matrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("sym_eigen: not square");
  if (!s.allFinite()) throw DomainError("sym_eigen: non-finite entry");
  const Eigen::Index n = s.rows();
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw DomainError("sym_eigen: matrix is not symmetric");
  }
  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        // Rotation that annihilates a(p, q) (Golub & Van Loan, sym.schur2).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  SymEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

Matrix orthonormalize(const Matrix& y) {
  const Eigen::Index rows = y.rows(), cols = y.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const double r0 = std::abs(r(0, 0));
  for (Eigen::Index k = 0; k < cols; ++k) {
    if (!(std::abs(r(k, k)) > 1e-12 * r0)) {
      throw RankDeficiencyError("orthonormalize: rank-deficient input");
    }
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

std::vector<Matrix> centralized_oi(const Matrix& p, const Matrix& init,
                                   int iters) {
  if (p.rows() != p.cols() || p.rows() != init.rows()) {
    throw DimensionError("centralized_oi: shape mismatch");
  }
  std::vector<Matrix> out;
  out.reserve(iters + 1);
  out.push_back(orthonormalize(init));
  for (int t = 0; t < iters; ++t) {
    out.push_back(orthonormalize(p * out.back()));
  }
  return out;
}

Matrix power_limit(const Matrix& f, long long k) {
  if (f.rows() != f.cols()) throw DimensionError("power_limit: not square");
  if (k < 1 || (k & (k - 1)) != 0) {
    throw DomainError("power_limit: k must be a positive power of two");
  }
  Matrix x = f;
  for (long long e = 1; e < k; e *= 2) x = (x * x).eval();
  return x;
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  const Matrix qa = orthonormalize(a);
  const Matrix qb = orthonormalize(b);
  const Matrix residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return svd.singularValues()(0);
}

Permutation brute_force_assignment(const Matrix& w) {
  const int m = static_cast<int>(w.rows());
  if (w.cols() != m || m < 1 || m > 8) {
    throw DomainError("brute_force_assignment: need square w with m <= 8");
  }
  std::vector<int> images(m);
  std::iota(images.begin(), images.end(), 0);
  std::vector<int> best = images;
  double best_value = -std::numeric_limits<double>::infinity();
  // next_permutation walks image sequences in lexicographic order, so a
  // strict comparison keeps the lexicographically first maximizer.
  do {
    double v = 0.0;
    for (int l = 0; l < m; ++l) v += w(images[l], l);
    if (v > best_value) {
      best_value = v;
      best = images;
    }
  } while (std::next_permutation(images.begin(), images.end()));
  return Permutation(best);
}

JointOptimum brute_force_labels(const PairwiseAssociations& a,
                                const SensorGraph& g, int anchor) {
  const int n = g.size();
  const int m = a.targets();
  if (n > 4 || m > 4) {
    throw DomainError("brute_force_labels: limited to n <= 4 and m <= 4");
  }
  check_covers_graph(a, g);
  std::vector<Matrix> perms;
  std::vector<Permutation> perm_values;
  std::vector<int> images(m);
  std::iota(images.begin(), images.end(), 0);
  do {
    perm_values.emplace_back(images);
    perms.push_back(matrix_of(perm_values.back()));
  } while (std::next_permutation(images.begin(), images.end()));

  const int count = static_cast<int>(perms.size());
  std::vector<int> choice(n, 0);
  const int identity_index = 0;  // first in lexicographic order
  JointOptimum best{{}, -std::numeric_limits<double>::infinity()};
  while (true) {
    choice[anchor] = identity_index;
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j : g.neighborhood(i)) {
        value += (perms[choice[i]].transpose() * a.at(i, j).matrix *
                  perms[choice[j]])
                     .trace();
      }
    }
    if (value > best.objective) {
      best.objective = value;
      best.labels.clear();
      for (int i = 0; i < n; ++i) best.labels.push_back(perm_values[choice[i]]);
    }
    int pos = 0;
    for (; pos < n; ++pos) {
      if (pos == anchor) continue;
      if (++choice[pos] < count) break;
      choice[pos] = 0;
    }
    if (pos == n) break;
  }
  return best;
}

Matrix random_doubly_stochastic(Rng& rng, int m, int terms) {
  Matrix out = Matrix::Zero(m, m);
  std::vector<double> w(terms);
  double total = 0.0;
  for (double& x : w) total += (x = 0.05 + uniform_real(rng));
  for (double x : w) out += (x / total) * matrix_of(random_permutation(rng, m));
  return out;
}

Matrix stack(const RelaxedLabeling& blocks) {
  const Eigen::Index m = blocks.front().rows();
  Matrix out(m * static_cast<Eigen::Index>(blocks.size()), blocks.front().cols());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out.middleRows(static_cast<Eigen::Index>(i) * m, m) = blocks[i];
  }
  return out;
}

RelaxedLabeling unstack(const Matrix& stacked, int m) {
  RelaxedLabeling out;
  for (Eigen::Index r = 0; r < stacked.rows(); r += m) {
    out.push_back(stacked.middleRows(r, m));
  }
  return out;
}

}  // namespace permsync::oracle
