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


#include "permsync/verify.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "permsync/assign.h"
#include "permsync/assoc.h"
#include "permsync/consensus.h"
#include "permsync/graph.h"
#include "permsync/oracle.h"
#include "permsync/spectral.h"

namespace permsync {
namespace {

constexpr long long kLimitPower = 1LL << 20;

int draw(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, hi - lo + 1));
}

// Runs `body` on `instances` seeds; the body returns the deviation for one
// instance and the check passes when every deviation is below `bound`.
CheckResult battery(const std::string& name, std::uint64_t seed, int instances,
                    double bound,
                    const std::function<double(Rng&)>& body) {
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < instances; ++k) {
    Rng rng(split_seed(seed, k));
    const double dev = body(rng);
    if (!(dev < bound)) ++failures;
    if (!(dev <= worst)) worst = dev;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d instances, worst %.3g (bound %.3g), %d failed",
                instances, worst, bound, failures);
  return {name, failures == 0, buf};
}

Matrix drop_index(const Matrix& x, int i) {
  const Eigen::Index n = x.rows();
  Matrix out(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == i) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == i) continue;
      out(rr, cc++) = x(r, c);
    }
    ++rr;
  }
  return out;
}

PairwiseAssociations soft_associations(const SensorGraph& g, int m, Rng& rng) {
  PairwiseAssociations a(g.size(), m);
  for (const Edge& e : g.edges()) {
    const int i = std::min(e.first, e.second), j = std::max(e.first, e.second);
    if (a.contains(i, j)) continue;
    a.set_reciprocal(i, j,
                     Association::soft(oracle::random_doubly_stochastic(rng, m, 3)));
  }
  return a;
}

double max_sum_error(const Matrix& x) {
  const double rows = (x.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (x.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

std::vector<CheckResult> lemmas(std::uint64_t seed, int instances) {
  std::vector<CheckResult> out;
  out.push_back(battery(
      "doubly stochastic closure over 1000 rounds", seed, instances, 1e-10,
      [](Rng& rng) {
        const int n = draw(rng, 2, 7), m = draw(rng, 2, 6);
        const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
        const PairwiseAssociations a = soft_associations(g, m, rng);
        ConsensusConfig cfg;
        cfg.init = ConsensusInit::kUniform;
        ConsensusState s = initial_consensus_state(n, m, cfg);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
          s = consensus_step(s, a, g, 0);
          for (const Matrix& x : s.labels) worst = std::max(worst, max_sum_error(x));
        }
        return worst;
      }));
  out.push_back(battery(
      "rooted graphs: rank(I - F) = n - 1 and F^k -> 1 c^T", seed + 1, instances,
      1e-8, [](Rng& rng) {
        const int n = draw(rng, 2, 10);
        const SensorGraph g =
            random_rooted_digraph(n, 0.25, draw(rng, 0, n - 1), false, rng);
        const GraphMatrices mats = build_matrices(g);
        const Matrix eye = Matrix::Identity(n, n);
        if (numerical_rank(eye - mats.propagation, laplacian_rank_tol(n)) != n - 1 ||
            numerical_rank(mats.laplacian, laplacian_rank_tol(n)) != n - 1) {
          return 1.0;
        }
        const Matrix limit = oracle::power_limit(mats.propagation, kLimitPower);
        double dev = 0.0;
        for (Eigen::Index r = 1; r < n; ++r) {
          dev = std::max(dev, (limit.row(r) - limit.row(0)).cwiseAbs().maxCoeff());
        }
        if (limit.row(0).minCoeff() < -1e-10) return 1.0;
        return std::max(dev, std::abs(limit.row(0).sum() - 1.0));
      }));
  out.push_back(battery(
      "source-only anchor: F^k -> 1 e_anchor^T", seed + 2, instances, 1e-8,
      [](Rng& rng) {
        const int n = draw(rng, 2, 8);
        const SensorGraph g = random_rooted_digraph(n, 0.3, 0, true, rng);
        const Matrix limit =
            oracle::power_limit(build_matrices(g).propagation, kLimitPower);
        if (limit(0, 0) != 1.0) return 1.0;
        return limit.rightCols(n - 1).cwiseAbs().maxCoeff();
      }));
  out.push_back(battery(
      "det L_i = 0 iff det(I - F_i) = 0", seed + 3, instances, 0.5,
      [](Rng& rng) {
        const int n = draw(rng, 2, 7);
        SensorGraph g(n);
        for (int u = 0; u < n; ++u) {
          for (int v = 0; v < n; ++v) {
            if (u != v && uniform_real(rng) < 0.3) g.add_edge(u, v);
          }
        }
        const GraphMatrices mats = build_matrices(g);
        const Matrix eye = Matrix::Identity(n, n);
        const double tol = laplacian_rank_tol(n);
        for (int i = 0; i < n; ++i) {
          const bool l_singular = numerical_rank(drop_index(mats.laplacian, i), tol) < n - 1;
          const bool f_singular =
              numerical_rank(drop_index(eye - mats.propagation, i), tol) < n - 1;
          if (l_singular != f_singular) return 1.0;
        }
        return 0.0;
      }));
  return out;
}

std::vector<CheckResult> theorems(std::uint64_t seed, int instances) {
  std::vector<CheckResult> out;
  out.push_back(battery(
      "noiseless recovery up to the anchor's permutation", seed, instances, 0.5,
      [](Rng& rng) {
        const int n = draw(rng, 3, 10), m = draw(rng, 2, 8);
        const SensorGraph g = random_rooted_digraph(n, 0.2, 0, false, rng);
        const SyntheticInstance inst = generate_synthetic(g, m, 0.0, rng);
        ConsensusConfig cfg;
        cfg.init = ConsensusInit::kRandomPermutation;
        cfg.init_seed = rng();
        cfg.anchor_label = random_permutation(rng, m);
        cfg.max_iters = 20000;
        const ConsensusResult res = run_consensus(inst.associations, g, cfg);
        if (!res.converged) return 1.0;
        const Labeling labels = round_labels(res.relaxed);
        if (!check_label_consistency(labels, inst.associations)) return 1.0;
        const Permutation shift =
            compose(inverse(inst.truth[0]), *cfg.anchor_label);
        for (int i = 0; i < n; ++i) {
          if (labels[i] != compose(inst.truth[i], shift)) return 1.0;
        }
        return 0.0;
      }));
  out.push_back(battery(
      "noisy limit independent of non-anchor init", seed + 1, instances, 1e-6,
      [](Rng& rng) {
        const int n = draw(rng, 3, 10), m = draw(rng, 2, 8);
        const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
        const SyntheticInstance inst = generate_synthetic(g, m, 0.3, rng);
        ConsensusConfig cfg;
        cfg.init = ConsensusInit::kRandomPermutation;
        cfg.max_iters = 100000;
        cfg.anchor_label = random_permutation(rng, m);
        cfg.init_seed = rng();
        const ConsensusResult r1 = run_consensus(inst.associations, g, cfg);
        cfg.init_seed = rng();
        const ConsensusResult r2 = run_consensus(inst.associations, g, cfg);
        if (!r1.converged || !r2.converged) return 1.0;
        double dev = 0.0;
        for (int i = 0; i < n; ++i) {
          dev = std::max(dev, (r1.relaxed[i] - r2.relaxed[i]).cwiseAbs().maxCoeff());
        }
        return dev;
      }));
  out.push_back(battery(
      "noiseless iterates follow componentwise averaging", seed + 2, instances,
      1e-12, [](Rng& rng) {
        const int n = draw(rng, 2, 8), m = draw(rng, 2, 6);
        const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
        const SyntheticInstance inst = generate_synthetic(g, m, 0.0, rng);
        ConsensusConfig cfg;
        cfg.init = ConsensusInit::kRandomPermutation;
        cfg.init_seed = rng();
        ConsensusState s = initial_consensus_state(n, m, cfg);
        const RelaxedLabeling truth = to_matrices(inst.truth);
        auto transformed = [&](const ConsensusState& st) {
          RelaxedLabeling x;
          for (int i = 0; i < n; ++i) x.push_back(truth[i].transpose() * st.labels[i]);
          return x;
        };
        double dev = 0.0;
        for (int t = 0; t < 30; ++t) {
          const RelaxedLabeling before = transformed(s);
          s = consensus_step(s, inst.associations, g, 0);
          const RelaxedLabeling after = transformed(s);
          for (int i = 1; i < n; ++i) {
            Matrix expect = before[i];
            for (int j : g.neighborhood(i)) expect += before[j];
            expect /= static_cast<double>(g.neighborhood(i).size() + 1);
            dev = std::max(dev, (after[i] - expect).cwiseAbs().maxCoeff());
          }
        }
        return dev;
      }));
  return out;
}

std::vector<CheckResult> equivalence(std::uint64_t seed, int instances) {
  std::vector<CheckResult> out;
  out.push_back(battery(
      "exact-average DOI = sqrt(n) x centralized orthogonal iteration", seed,
      instances, 1e-9, [](Rng& rng) {
        const int n = draw(rng, 2, 8), m = draw(rng, 2, 6);
        const SensorGraph g = random_rooted_digraph(n, 0.4, 0, false, rng);
        const SyntheticInstance inst =
            generate_synthetic(g, m, 0.5 * uniform_real(rng), rng);
        SpectralConfig cfg;
        cfg.inner_mode = InnerMode::kExactAverage;
        cfg.outer_iters = 20;
        const Matrix p = build_block_matrix(inst.associations, g);
        const std::vector<Matrix> central = oracle::centralized_oi(
            p, oracle::stack(initial_spectral_state(n, m, cfg)), cfg.outer_iters);
        double dev = 0.0;
        const double scale = std::sqrt(static_cast<double>(n));
        run_doi(inst.associations, g, cfg, nullptr,
                [&](int t, const RelaxedLabeling& blocks) {
                  dev = std::max(dev, (oracle::stack(blocks) - scale * central[t])
                                          .cwiseAbs()
                                          .maxCoeff());
                });
        return dev;
      }));
  out.push_back(battery(
      "consensus through the network harness = direct run", seed + 1, instances,
      0.5, [](Rng& rng) {
        const int n = draw(rng, 2, 8), m = draw(rng, 2, 6);
        const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
        const SyntheticInstance inst = generate_synthetic(g, m, 0.3, rng);
        const ConsensusConfig cfg;
        const ConsensusResult direct = run_consensus(inst.associations, g, cfg);
        const NetworkedConsensus net = run_consensus_networked(inst.associations, g, cfg);
        if (direct.rounds != net.result.rounds) return 1.0;
        for (int i = 0; i < n; ++i) {
          if (direct.relaxed[i] != net.result.relaxed[i]) return 1.0;
        }
        return 0.0;
      }));
  out.push_back(battery(
      "DOI through the network harness = direct run", seed + 2, instances, 0.5,
      [](Rng& rng) {
        const int n = draw(rng, 2, 6), m = draw(rng, 2, 5);
        Rng graph_rng(rng());
        const SensorGraph g = gen_graph(GraphKind::kRandomSubset, n, 0.7, graph_rng);
        const SyntheticInstance inst = generate_synthetic(g, m, 0.3, rng);
        SpectralConfig cfg;
        cfg.outer_iters = 5;
        cfg.inner_iters = 10;
        const SpectralResult direct = run_doi(inst.associations, g, cfg);
        const NetworkedSpectral net = run_doi_networked(inst.associations, g, cfg);
        for (int i = 0; i < n; ++i) {
          if (direct.relaxed[i] != net.result.relaxed[i]) return 1.0;
        }
        return 0.0;
      }));
  out.push_back(battery(
      "consensus step = block propagation matrix times stacked state", seed + 3,
      instances, 1e-12, [](Rng& rng) {
        const int n = draw(rng, 2, 8), m = draw(rng, 2, 6);
        const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
        const PairwiseAssociations a = soft_associations(g, m, rng);
        ConsensusConfig cfg;
        cfg.init = ConsensusInit::kRandomPermutation;
        cfg.init_seed = rng();
        const ConsensusState s = initial_consensus_state(n, m, cfg);
        const Matrix expect =
            build_dag_propagation(a, g) * oracle::stack(s.labels);
        const Matrix got = oracle::stack(consensus_step(s, a, g, 0).labels);
        return (got - expect).bottomRows(static_cast<Eigen::Index>(n - 1) * m)
            .cwiseAbs()
            .maxCoeff();
      }));
  return out;
}

std::vector<CheckResult> assignment(std::uint64_t seed, int instances) {
  std::vector<CheckResult> out;
  out.push_back(battery(
      "Hungarian = exhaustive search (permutation and objective)", seed,
      instances, 0.5, [](Rng& rng) {
        for (int m = 1; m <= 7; ++m) {
          Matrix w(m, m);
          // Small integers force ties, which exercises the tie rule.
          const bool integral = uniform_real(rng) < 0.5;
          for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
              w(r, c) = integral ? static_cast<double>(uniform_index(rng, 4))
                                 : uniform_real(rng) * 10.0 - 5.0;
            }
          }
          const Permutation fast = solve_assignment(w);
          const Permutation slow = oracle::brute_force_assignment(w);
          if (fast != slow ||
              assignment_objective(w, fast) != assignment_objective(w, slow)) {
            return 1.0;
          }
        }
        return 0.0;
      }));
  out.push_back(battery(
      "rounding doubly stochastic matrices = exhaustive search", seed + 1,
      instances, 0.5, [](Rng& rng) {
        const int m = draw(rng, 2, 6);
        const Matrix x = oracle::random_doubly_stochastic(rng, m, 4);
        return round_labels({x})[0] == oracle::brute_force_assignment(x) ? 0.0 : 1.0;
      }));
  return out;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = {"lemmas", "theorems",
                                                 "equivalence", "assignment"};
  return names;
}

std::vector<CheckResult> run_verify(const std::string& suite,
                                    std::uint64_t seed, int instances) {
  if (instances < 1) throw ConfigError("instances must be positive");
  if (suite == "lemmas") return lemmas(seed, instances);
  if (suite == "theorems") return theorems(seed, instances);
  if (suite == "equivalence") return equivalence(seed, instances);
  if (suite == "assignment") return assignment(seed, instances);
  throw ConfigError("unknown suite '" + suite +
                    "' (expected lemmas, theorems, equivalence or assignment)");
}

}  // namespace permsync
