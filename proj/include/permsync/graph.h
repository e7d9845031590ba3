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

#ifndef PERMSYNC_GRAPH_H_
#define PERMSYNC_GRAPH_H_

#include <istream>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "permsync/common.h"

namespace permsync {

// Directed edge (from, to): information flows from `from` to `to`.
using Edge = std::pair<int, int>;

// Directed communication graph between sensors. Vertices are 0..n-1.
class SensorGraph {
 public:
  explicit SensorGraph(int n);

  // Throws DomainError on self-loops, out-of-range endpoints or weight <= 0.
  // Re-adding an edge overwrites its weight.
  void add_edge(int from, int to, double weight = 1.0);
  // Adds both directions.
  void add_undirected(int a, int b, double weight = 1.0);
  void remove_edge(int from, int to);

  int size() const { return n_; }
  bool has_edge(int from, int to) const;
  double weight(int from, int to) const;
  std::size_t edge_count() const { return weights_.size(); }
  // Edges in lexicographic (from, to) order.
  std::vector<Edge> edges() const;

  // In-neighbours of i (sources of information flowing into i), ascending.
  const std::vector<int>& neighborhood(int i) const;
  // Out-neighbours of i, ascending.
  const std::vector<int>& out_neighbors(int i) const;

  int max_in_degree() const;

 private:
  void check_vertex(int i) const;

  int n_;
  std::map<Edge, double> weights_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

struct GraphMatrices {
  Matrix adjacency;  // [A]_ij = w(j, i) when (j, i) is an edge.
  Matrix degree;     // diagonal weighted in-degree
  Matrix laplacian;  // degree - adjacency
  Matrix propagation;  // (I + degree)^-1 (I + adjacency), row-stochastic
};

GraphMatrices build_matrices(const SensorGraph& g);

// Numerical rank by Gaussian elimination with complete pivoting. Pivots with
// magnitude below `tol` count as zero.
int numerical_rank(const Matrix& m, double tol);

// Pivot tolerance used for Laplacian rank decisions: 1e-9 * n.
double laplacian_rank_tol(int n);

// True iff rank(L) == n - 1.
bool has_rooted_out_branching(const SensorGraph& g);

// Weighted in-degree equals weighted out-degree at every vertex.
bool is_balanced(const SensorGraph& g);

enum class GraphKind { kComplete, kRandomSubset };

// complete: all ordered pairs. random_subset: ceil(fraction * n(n-1)/2)
// undirected pairs kept uniformly at random (both directions each), redrawn
// until the result has a rooted out-branching. Throws GenerationError after
// 100 redraws.
SensorGraph gen_graph(GraphKind kind, int n, double edge_fraction, Rng& rng);

// Random digraph in which `root` reaches every vertex: a random spanning
// out-tree from `root` plus each remaining ordered pair with probability
// `extra_prob`. When `source_only` is set, no edge points into `root`.
SensorGraph random_rooted_digraph(int n, double extra_prob, int root,
                                  bool source_only, Rng& rng);

// Text format: first line n, then one "i j" (1-based) edge per line. Lines
// starting with '#' are comments.
void write_graph(std::ostream& out, const SensorGraph& g);
SensorGraph read_graph(std::istream& in);

}  // namespace permsync

#endif  // PERMSYNC_GRAPH_H_
