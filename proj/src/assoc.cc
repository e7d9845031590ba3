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
#include <cmath>
#include <numeric>
#include <string>

#include "permsync/assign.h"

namespace permsync {

Association Association::hard(const Permutation& p) {
  return Association{matrix_of(p), p};
}

Association Association::soft(Matrix m) {
  auto p = permutation_of(m);
  return Association{std::move(m), std::move(p)};
}

void apply_association(const Association& a, const Matrix& x, Matrix& out) {
  if (a.perm) {
    out.resize(x.rows(), x.cols());
    // Row l of x lands on row pi(l) because P e_l = e_{pi(l)}.
    for (int l = 0; l < a.perm->size(); ++l) out.row((*a.perm)(l)) = x.row(l);
  } else {
    out.noalias() = a.matrix * x;
  }
}

void accumulate_association(const Association& a, const Matrix& x,
                            Matrix& out) {
  if (a.perm) {
    for (int l = 0; l < a.perm->size(); ++l) out.row((*a.perm)(l)) += x.row(l);
  } else {
    out.noalias() += a.matrix * x;
  }
}

PairwiseAssociations::PairwiseAssociations(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 1) {
    throw DimensionError("associations need n >= 1 sensors and m >= 1 targets");
  }
}

void PairwiseAssociations::set(int i, int j, Association a) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || i == j) {
    throw DomainError("association pair (" + std::to_string(i) + ", " +
                      std::to_string(j) + ") is invalid");
  }
  if (a.matrix.rows() != m_ || a.matrix.cols() != m_) {
    throw DimensionError("association must be " + std::to_string(m_) + "x" +
                         std::to_string(m_));
  }
  if (!is_row_stochastic(a.matrix)) {
    throw DomainError("association (" + std::to_string(i) + ", " +
                      std::to_string(j) + ") is not row-stochastic");
  }
  data_.insert_or_assign({i, j}, std::move(a));
}

void PairwiseAssociations::set_reciprocal(int i, int j, const Association& a) {
  set(i, j, a);
  if (a.perm) {
    set(j, i, Association::hard(inverse(*a.perm)));
  } else {
    set(j, i, Association::soft(a.matrix.transpose()));
  }
}

const Association& PairwiseAssociations::at(int i, int j) const {
  auto it = data_.find({i, j});
  if (it == data_.end()) {
    throw DomainError("no association stored for (" + std::to_string(i) +
                      ", " + std::to_string(j) + ")");
  }
  return it->second;
}

bool PairwiseAssociations::all_hard() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const auto& kv) { return kv.second.perm.has_value(); });
}

void check_covers_graph(const PairwiseAssociations& a, const SensorGraph& g) {
  if (a.sensors() != g.size()) {
    throw DimensionError("associations and graph disagree on sensor count");
  }
  for (const auto& [from, to] : g.edges()) {
    if (!a.contains(to, from)) {
      throw DimensionError("missing association (" + std::to_string(to + 1) +
                           ", " + std::to_string(from + 1) + ")");
    }
  }
}

RelaxedLabeling to_matrices(const Labeling& labels) {
  RelaxedLabeling out;
  out.reserve(labels.size());
  for (const auto& p : labels) out.push_back(matrix_of(p));
  return out;
}

namespace {

const Permutation& hard_at(const PairwiseAssociations& a, int i, int j) {
  const Association& x = a.at(i, j);
  if (!x.perm) {
    throw DomainError("association (" + std::to_string(i) + ", " +
                      std::to_string(j) + ") is not a permutation");
  }
  return *x.perm;
}

// Pairs (i, j) whose association the graph requires.
bool required(const SensorGraph& g, int i, int j) { return g.has_edge(j, i); }

}  // namespace

std::vector<Triple> check_pairwise_consistency(const PairwiseAssociations& a,
                                               const SensorGraph& g) {
  check_covers_graph(a, g);
  const int n = g.size();
  std::vector<Triple> bad;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i || !required(g, i, j)) continue;
      const Permutation& pij = hard_at(a, i, j);
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (!required(g, j, k) || !required(g, i, k)) continue;
        if (compose(pij, hard_at(a, j, k)) != hard_at(a, i, k)) {
          bad.push_back({i, j, k});
        }
      }
    }
  }
  return bad;
}

bool check_label_consistency(const Labeling& labels,
                             const PairwiseAssociations& a) {
  if (static_cast<int>(labels.size()) != a.sensors()) {
    throw DimensionError("label count differs from sensor count");
  }
  for (const auto& p : labels) {
    if (p.size() != a.targets()) {
      throw DimensionError("label size differs from target count");
    }
  }
  for (const auto& [key, assoc] : a.entries()) {
    if (!assoc.perm) {
      throw DomainError("label consistency needs hard associations");
    }
    const auto [i, j] = key;
    if (*assoc.perm != compose(labels[i], inverse(labels[j]))) return false;
  }
  return true;
}

PairwiseAssociations induced_associations(const Labeling& truth,
                                          const SensorGraph& g) {
  PairwiseAssociations out(g.size(), truth.front().size());
  for (const auto& [from, to] : g.edges()) {
    out.set_reciprocal(to, from, Association::hard(compose(
                                     truth[to], inverse(truth[from]))));
  }
  return out;
}

Permutation corrupt_permutation(const Permutation& p, double fraction,
                                Rng& rng) {
  const int m = p.size();
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("outlier fraction must lie in [0, 1]");
  }
  const int k = static_cast<int>(std::ceil(fraction * m - 1e-9));
  if (k < 2) {
    // Rotating fewer than two entries changes nothing.
    return p;
  }
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int s = 0; s < k; ++s) {
    const int t = s + static_cast<int>(uniform_index(rng, m - s));
    std::swap(idx[s], idx[t]);
  }
  const int shift = 1 + static_cast<int>(uniform_index(rng, k - 1));
  std::vector<int> images(p.images().begin(), p.images().end());
  for (int s = 0; s < k; ++s) {
    images[idx[s]] = p(idx[(s + shift) % k]);
  }
  return Permutation(std::move(images));
}

SyntheticInstance generate_synthetic(const SensorGraph& g, int m,
                                     double outlier_fraction, Rng& rng) {
  const int n = g.size();
  Labeling truth;
  truth.reserve(n);
  for (int i = 0; i < n; ++i) truth.push_back(random_permutation(rng, m));

  PairwiseAssociations assoc(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!g.has_edge(i, j) && !g.has_edge(j, i)) continue;
      const Permutation exact = compose(truth[i], inverse(truth[j]));
      assoc.set_reciprocal(
          i, j, Association::hard(corrupt_permutation(exact, outlier_fraction, rng)));
    }
  }
  return {std::move(assoc), std::move(truth)};
}

double accuracy(const Labeling& labels, const Labeling& truth, int anchor) {
  if (labels.size() != truth.size() || labels.empty()) {
    throw DimensionError("accuracy: label sets differ in size");
  }
  if (anchor < 0 || anchor >= static_cast<int>(labels.size())) {
    throw DomainError("accuracy: anchor out of range");
  }
  const Matrix profit =
      matrix_of(labels[anchor]).transpose() * matrix_of(truth[anchor]);
  const Permutation align = solve_assignment(profit);
  const int m = truth.front().size();
  long correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    correct += m - perm_distance(compose(labels[i], align), truth[i]);
  }
  return static_cast<double>(correct) /
         (static_cast<double>(labels.size()) * m);
}

Matrix build_block_matrix(const PairwiseAssociations& a, const SensorGraph& g) {
  check_covers_graph(a, g);
  const int n = g.size();
  const int m = a.targets();
  Matrix p = Matrix::Zero(n * m, n * m);
  for (int i = 0; i < n; ++i) {
    p.block(i * m, i * m, m, m).setIdentity();
    for (int j : g.neighborhood(i)) {
      p.block(i * m, j * m, m, m) = a.at(i, j).matrix;
    }
  }
  return p;
}

Matrix build_dag_propagation(const PairwiseAssociations& a,
                             const SensorGraph& g) {
  Matrix f = build_block_matrix(a, g);
  const int m = a.targets();
  for (int i = 0; i < g.size(); ++i) {
    const double scale =
        1.0 / static_cast<double>(g.neighborhood(i).size() + 1);
    f.middleRows(i * m, m) *= scale;
  }
  return f;
}

std::vector<DagEdge> data_association_edges(const PairwiseAssociations& a) {
  std::vector<DagEdge> out;
  const int m = a.targets();
  for (const auto& [key, assoc] : a.entries()) {
    for (int k = 0; k < m; ++k) {
      for (int l = 0; l < m; ++l) {
        const double w = assoc.matrix(k, l);
        if (w > 0.0) out.push_back({key.first, k, key.second, l, w});
      }
    }
  }
  return out;
}

double joint_objective(const Labeling& labels, const PairwiseAssociations& a,
                       const SensorGraph& g) {
  check_covers_graph(a, g);
  double total = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    for (int j : g.neighborhood(i)) {
      const Matrix& x = a.at(i, j).matrix;
      for (int l = 0; l < a.targets(); ++l) {
        total += x(labels[i](l), labels[j](l));
      }
    }
  }
  return total;
}

}  // namespace permsync
