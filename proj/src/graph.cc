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

#include "permsync/graph.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "permsync/perm.h"

namespace permsync {

SensorGraph::SensorGraph(int n) : n_(n), in_(n), out_(n) {
  if (n < 1) throw DomainError("graph needs at least one vertex");
}

void SensorGraph::check_vertex(int i) const {
  if (i < 0 || i >= n_) {
    throw DomainError("vertex " + std::to_string(i) + " out of range [0, " +
                      std::to_string(n_) + ")");
  }
}

namespace {

void insert_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

void erase_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

}  // namespace

void SensorGraph::add_edge(int from, int to, double weight) {
  check_vertex(from);
  check_vertex(to);
  if (from == to) throw DomainError("self-loops are not allowed");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw DomainError("edge weight must be positive and finite");
  }
  weights_[{from, to}] = weight;
  insert_sorted(out_[from], to);
  insert_sorted(in_[to], from);
}

void SensorGraph::add_undirected(int a, int b, double weight) {
  add_edge(a, b, weight);
  add_edge(b, a, weight);
}

void SensorGraph::remove_edge(int from, int to) {
  check_vertex(from);
  check_vertex(to);
  if (weights_.erase({from, to}) == 0) return;
  erase_sorted(out_[from], to);
  erase_sorted(in_[to], from);
}

bool SensorGraph::has_edge(int from, int to) const {
  return weights_.contains({from, to});
}

double SensorGraph::weight(int from, int to) const {
  auto it = weights_.find({from, to});
  return it == weights_.end() ? 0.0 : it->second;
}

std::vector<Edge> SensorGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(weights_.size());
  for (const auto& [e, w] : weights_) out.push_back(e);
  return out;
}

const std::vector<int>& SensorGraph::neighborhood(int i) const {
  check_vertex(i);
  return in_[i];
}

const std::vector<int>& SensorGraph::out_neighbors(int i) const {
  check_vertex(i);
  return out_[i];
}

int SensorGraph::max_in_degree() const {
  std::size_t d = 0;
  for (const auto& v : in_) d = std::max(d, v.size());
  return static_cast<int>(d);
}

GraphMatrices build_matrices(const SensorGraph& g) {
  const int n = g.size();
  GraphMatrices out;
  out.adjacency = Matrix::Zero(n, n);
  for (const auto& [from, to] : g.edges()) {
    out.adjacency(to, from) = g.weight(from, to);
  }
  out.degree = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) out.degree(i, i) = out.adjacency.row(i).sum();
  out.laplacian = out.degree - out.adjacency;
  // (I + D) is diagonal, so the inverse is a row scaling.
  out.propagation = Matrix::Identity(n, n) + out.adjacency;
  for (int i = 0; i < n; ++i) {
    out.propagation.row(i) /= 1.0 + out.degree(i, i);
  }
  return out;
}

int numerical_rank(const Matrix& m, double tol) {
  Matrix a = m;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  int rank = 0;
  for (Eigen::Index k = 0; k < std::min(rows, cols); ++k) {
    Eigen::Index pr = k, pc = k;
    double best = 0.0;
    for (Eigen::Index i = k; i < rows; ++i) {
      for (Eigen::Index j = k; j < cols; ++j) {
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          pr = i;
          pc = j;
        }
      }
    }
    if (best < tol) break;
    a.row(k).swap(a.row(pr));
    a.col(k).swap(a.col(pc));
    for (Eigen::Index i = k + 1; i < rows; ++i) {
      const double f = a(i, k) / a(k, k);
      a.row(i).tail(cols - k) -= f * a.row(k).tail(cols - k);
    }
    ++rank;
  }
  return rank;
}

double laplacian_rank_tol(int n) { return 1e-9 * n; }

bool has_rooted_out_branching(const SensorGraph& g) {
  const int n = g.size();
  const Matrix l = build_matrices(g).laplacian;
  return numerical_rank(l, laplacian_rank_tol(n)) == n - 1;
}

bool is_balanced(const SensorGraph& g) {
  const int n = g.size();
  std::vector<double> in(n, 0.0), out(n, 0.0);
  for (const auto& [from, to] : g.edges()) {
    const double w = g.weight(from, to);
    out[from] += w;
    in[to] += w;
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(in[i] - out[i]) > 1e-12 * std::max(1.0, in[i])) return false;
  }
  return true;
}

SensorGraph gen_graph(GraphKind kind, int n, double edge_fraction, Rng& rng) {
  if (n < 2) throw ConfigError("gen_graph: need n >= 2");
  if (!(edge_fraction > 0.0 && edge_fraction <= 1.0)) {
    throw ConfigError("gen_graph: edge_fraction must lie in (0, 1]");
  }
  if (kind == GraphKind::kComplete) {
    SensorGraph g(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) g.add_edge(i, j);
      }
    }
    return g;
  }

  std::vector<Edge> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  // 1e-9 guards against fraction * count landing a hair above an integer.
  const std::size_t keep = static_cast<std::size_t>(
      std::ceil(edge_fraction * static_cast<double>(pairs.size()) - 1e-9));
  constexpr int kMaxDraws = 100;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    // Partial Fisher-Yates: the first `keep` slots become a uniform subset.
    for (std::size_t i = 0; i < keep; ++i) {
      const std::size_t j = i + uniform_index(rng, pairs.size() - i);
      std::swap(pairs[i], pairs[j]);
    }
    SensorGraph g(n);
    for (std::size_t i = 0; i < keep; ++i) {
      g.add_undirected(pairs[i].first, pairs[i].second);
    }
    if (has_rooted_out_branching(g)) return g;
  }
  throw GenerationError("gen_graph: no rooted graph after 100 draws");
}

SensorGraph random_rooted_digraph(int n, double extra_prob, int root,
                                  bool source_only, Rng& rng) {
  SensorGraph g(n);
  if (root < 0 || root >= n) throw DomainError("root out of range");
  // Attach vertices in random order, each to a uniformly chosen earlier one.
  Permutation order = random_permutation(rng, n);
  std::vector<int> seq;
  seq.push_back(root);
  for (int k = 0; k < n; ++k) {
    if (order(k) != root) seq.push_back(order(k));
  }
  for (std::size_t k = 1; k < seq.size(); ++k) {
    const int parent = seq[uniform_index(rng, k)];
    g.add_edge(parent, seq[k]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || g.has_edge(i, j)) continue;
      if (source_only && j == root) continue;
      if (uniform_real(rng) < extra_prob) g.add_edge(i, j);
    }
  }
  return g;
}

void write_graph(std::ostream& out, const SensorGraph& g) {
  out << g.size() << '\n';
  for (const auto& [from, to] : g.edges()) {
    out << from + 1 << ' ' << to + 1 << '\n';
  }
}

namespace {

bool is_blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

SensorGraph read_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<SensorGraph> g;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (is_blank_or_comment(line)) continue;
    std::istringstream ss(line);
    if (!g) {
      int n = 0;
      std::string extra;
      if (!(ss >> n) || (ss >> extra) || n < 1) {
        throw ParseError("expected vertex count", lineno);
      }
      g.emplace(n);
      continue;
    }
    int i = 0, j = 0;
    std::string extra;
    if (!(ss >> i >> j) || (ss >> extra)) {
      throw ParseError("expected an edge 'i j'", lineno);
    }
    try {
      g->add_edge(i - 1, j - 1);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!g) throw ParseError("empty graph file", lineno);
  return *std::move(g);
}

}  // namespace permsync
