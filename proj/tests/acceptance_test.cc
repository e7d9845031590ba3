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


// Acceptance run: one PASS/FAIL line per criterion. The exit status counts
// failures, minus those named with --expect-fail (still printed as FAIL).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <thread>

#include "permsync/assign.h"
#include "permsync/consensus.h"
#include "permsync/experiment.h"
#include "permsync/oracle.h"
#include "permsync/spectral.h"
#include "test_support.h"

namespace permsync {
namespace {

using testing::complete_graph;
using testing::draw;
using testing::max_abs;

struct Outcome {
  bool passed;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome noiseless_exactness() {
  const auto start = Clock::now();
  Rng rng(101);
  int exact = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = draw(rng, 3, 10), m = draw(rng, 2, 8);
    const SensorGraph g = random_rooted_digraph(n, 0.2, 0, false, rng);
    const SyntheticInstance inst = generate_synthetic(g, m, 0.0, rng);
    ConsensusConfig cfg;
    cfg.max_iters = 100000;
    const ConsensusResult r = run_consensus(inst.associations, g, cfg);
    const Labeling labels = round_labels(r.relaxed);
    if (r.converged && accuracy(labels, inst.truth) == 1.0 &&
        check_label_consistency(labels, inst.associations)) {
      ++exact;
    }
  }
  const double t = seconds_since(start);
  return {exact == 50 && t < 10.0, fmt("%.0f/50 exact, %.2f s", exact, t)};
}

Outcome doubly_stochastic_closure() {
  Rng rng(202);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int n = draw(rng, 2, 8), m = draw(rng, 2, 6);
    const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
    PairwiseAssociations a(n, m);
    for (const Edge& e : g.edges()) {
      if (!a.contains(e.second, e.first)) {
        a.set_reciprocal(e.second, e.first,
                         Association::soft(oracle::random_doubly_stochastic(rng, m, 3)));
      }
    }
    ConsensusConfig cfg;
    cfg.init = ConsensusInit::kUniform;
    ConsensusState s = initial_consensus_state(n, m, cfg);
    for (int t = 0; t < 1000; ++t) {
      s = consensus_step(s, a, g, 0);
      for (const Matrix& x : s.labels) {
        worst = std::max({worst, (x.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                          (x.colwise().sum().array() - 1.0).abs().maxCoeff()});
      }
    }
  }
  return {worst < 1e-10, fmt("max |sum - 1| = %.2e over 10 instances x 1000 rounds", worst)};
}

Outcome propagation_limit() {
  Rng rng(303);
  int good = 0;
  double spread = 0.0, neg = 0.0, mass = 0.0;
  for (int k = 0; k < 30; ++k) {
    const int n = draw(rng, 2, 10);
    const SensorGraph g = random_rooted_digraph(n, 0.25, draw(rng, 0, n - 1), false, rng);
    const Matrix f = build_matrices(g).propagation;
    const int rank = numerical_rank(Matrix::Identity(n, n) - f, laplacian_rank_tol(n));
    const Matrix lim = oracle::power_limit(f, 1LL << 20);
    double s = 0.0;
    for (int i = 1; i < n; ++i) s = std::max(s, max_abs(lim.row(i) - lim.row(0)));
    spread = std::max(spread, s);
    neg = std::min(neg, lim.row(0).minCoeff());
    mass = std::max(mass, std::abs(lim.row(0).sum() - 1.0));
    if (rank == n - 1 && s <= 1e-8 && lim.row(0).minCoeff() >= -1e-10 &&
        std::abs(lim.row(0).sum() - 1.0) <= 1e-8) {
      ++good;
    }
  }
  return {good == 30, fmt("%.0f/30 graphs; row spread %.1e, min c %.1e", good, spread, neg) +
                          fmt(", |sum c - 1| %.1e", mass)};
}

Outcome source_anchor_limit() {
  Rng rng(404);
  int good = 0;
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    const int n = draw(rng, 2, 8);
    const SensorGraph g = random_rooted_digraph(n, 0.3, 0, true, rng);
    const Matrix lim = oracle::power_limit(build_matrices(g).propagation, 1LL << 20);
    const double right = max_abs(lim.rightCols(n - 1));
    worst = std::max(worst, right);
    if (lim(0, 0) == 1.0 && right < 1e-8) ++good;
  }
  return {good == 30, fmt("%.0f/30 graphs; max right-column entry %.1e", good, worst)};
}

Outcome init_independence() {
  Rng rng(505);
  double worst = 0.0;
  bool converged = true;
  for (int k = 0; k < 10; ++k) {
    const int n = draw(rng, 4, 10), m = draw(rng, 3, 8);
    const SensorGraph g = random_rooted_digraph(n, 0.3, 0, false, rng);
    const SyntheticInstance inst = generate_synthetic(g, m, 0.3, rng);
    ConsensusConfig cfg;
    cfg.init = ConsensusInit::kRandomPermutation;
    cfg.conv_tol = 1e-9;
    cfg.max_iters = 100000;
    cfg.init_seed = 2 * k + 1;
    const ConsensusResult a = run_consensus(inst.associations, g, cfg);
    cfg.init_seed = 2 * k + 2;
    const ConsensusResult b = run_consensus(inst.associations, g, cfg);
    converged = converged && a.converged && b.converged;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, max_abs(a.relaxed[i] - b.relaxed[i]));
    }
  }
  return {converged && worst < 1e-6,
          fmt("max |limit difference| = %.2e over 10 noisy instances", worst)};
}

ExperimentSpec figure_spec(GraphKind kind, double fraction) {
  ExperimentSpec spec;
  spec.seed = 2026;
  spec.trials = 10;
  spec.sensors = 20;
  spec.targets = 50;
  spec.graph = kind;
  spec.edge_fraction = fraction;
  spec.outliers = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  return spec;
}

int worker_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string table(const SweepResult& r) {
  std::string out;
  for (const SummaryRow& row : r.summary) {
    out += fmt("\n    p=%.1f cs=%.3f sp=%.3f", row.p, *row.mean_cs, *row.mean_sp);
  }
  return out;
}

Outcome full_graph_sweep(SweepResult& full) {
  const auto start = Clock::now();
  full = run_sweep(figure_spec(GraphKind::kComplete, 1.0), worker_count());
  const double t = seconds_since(start);
  bool cs_ok = true, sp_ok = true, order_ok = true;
  for (const SummaryRow& row : full.summary) {
    if (row.p <= 0.3 + 1e-12 && *row.mean_cs < 0.99) cs_ok = false;
    if (row.p <= 0.7 + 1e-12 && *row.mean_sp < 0.99) sp_ok = false;
    if (*row.mean_sp < *row.mean_cs - 0.02) order_ok = false;
  }
  std::string detail = std::string("cs>=0.99 (p<=0.3): ") + (cs_ok ? "yes" : "NO") +
                       "; sp>=0.99 (p<=0.7): " + (sp_ok ? "yes" : "NO") +
                       "; sp>=cs-0.02: " + (order_ok ? "yes" : "NO") +
                       fmt("; %.0f s", t) + table(full);
  return {cs_ok && sp_ok && order_ok && t < 300.0, detail};
}

Outcome half_graph_sweep(const SweepResult& full) {
  const SweepResult half =
      run_sweep(figure_spec(GraphKind::kRandomSubset, 0.5), worker_count());
  bool below = true, cs_ok = true;
  for (std::size_t k = 0; k < half.summary.size(); ++k) {
    const SummaryRow& h = half.summary[k];
    const SummaryRow& f = full.summary[k];
    if (*h.mean_cs > *f.mean_cs + 0.02 || *h.mean_sp > *f.mean_sp + 0.02) below = false;
    if (h.p <= 0.2 + 1e-12 && *h.mean_cs < 0.95) cs_ok = false;
  }
  return {below && cs_ok, std::string("half <= full + 0.02: ") + (below ? "yes" : "NO") +
                              "; cs>=0.95 (p<=0.2): " + (cs_ok ? "yes" : "NO") + table(half)};
}

Outcome centralized_equivalence() {
  Rng rng(808);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = draw(rng, 2, 8), m = draw(rng, 2, 6);
    const SensorGraph g = random_rooted_digraph(n, 0.4, 0, false, rng);
    const SyntheticInstance inst = generate_synthetic(g, m, 0.5 * uniform_real(rng), rng);
    SpectralConfig cfg;
    cfg.inner_mode = InnerMode::kExactAverage;
    cfg.outer_iters = 20;
    cfg.init = SpectralInit::kRandom;
    cfg.init_seed = rng();
    const Matrix p = build_block_matrix(inst.associations, g);
    const std::vector<Matrix> central = oracle::centralized_oi(
        p, oracle::stack(initial_spectral_state(n, m, cfg)), cfg.outer_iters);
    // The distributed blocks carry the sqrt(n) scale of permutation blocks.
    const double scale = std::sqrt(static_cast<double>(n));
    run_doi(inst.associations, g, cfg, nullptr, [&](int t, const RelaxedLabeling& blocks) {
      worst = std::max(worst, max_abs(oracle::stack(blocks) - scale * central[t]));
    });
  }
  return {worst <= 1e-9, fmt("max entry deviation from sqrt(n) x centralized = %.2e", worst)};
}

double assignment_value(const Matrix& w, const Permutation& p) {
  double v = 0.0;
  for (int l = 0; l < p.size(); ++l) v += w(p(l), l);
  return v;
}

Outcome hungarian_optimality() {
  Rng rng(909);
  int good = 0;
  for (int k = 0; k < 600; ++k) {
    const int m = k < 500 ? 6 : 7;
    const Matrix w = testing::random_matrix(rng, m, m, 0.0, 1.0);
    if (assignment_value(w, solve_assignment(w)) ==
        assignment_value(w, oracle::brute_force_assignment(w))) {
      ++good;
    }
  }
  return {good == 600, fmt("%.0f/600 match the exhaustive optimum", good)};
}

Outcome procrustes_recovery() {
  Rng rng(1010);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int m = draw(rng, 1, 10);
    const Matrix q0 = oracle::orthonormalize(testing::random_matrix(rng, m, m));
    const Matrix corrected = procrustes_correct({q0.transpose()}, 0)[0];
    worst = std::max(worst, max_abs(corrected - Matrix::Identity(m, m)));
  }
  return {worst <= 1e-10, fmt("max |corrected anchor - I| = %.2e", worst)};
}

Outcome tiny_joint_optimality() {
  Rng rng(1111);
  int good = 0;
  std::string misses;
  for (int k = 0; k < 20; ++k) {
    const int n = draw(rng, 3, 4), m = draw(rng, 2, 3);
    const SensorGraph g = k % 2 == 0 ? complete_graph(n)
                                     : gen_graph(GraphKind::kRandomSubset, n, 0.7, rng);
    SyntheticInstance inst = generate_synthetic(g, m, 0.0, rng);
    const std::vector<Edge> edges = g.edges();
    const Edge e = edges[uniform_index(rng, edges.size())];
    inst.associations.set_reciprocal(
        e.second, e.first,
        Association::hard(corrupt_permutation(
            *inst.associations.at(e.second, e.first).perm, 1.0, rng)));
    const double best = oracle::brute_force_labels(inst.associations, g).objective;
    try {
      const Labeling sp = solve_spectral(inst.associations, g, SpectralConfig{});
      if (joint_objective(sp, inst.associations, g) == best) {
        ++good;
      } else {
        misses += fmt("\n    n=%.0f m=%.0f: objective below optimum %.0f", n, m, best);
      }
    } catch (const RankDeficiencyError& e) {
      misses += fmt("\n    n=%.0f m=%.0f: ", n, m) + e.what();
    }
  }
  return {good == 20, fmt("%.0f/20 reach the exhaustive optimum", good) + misses};
}

}  // namespace
}  // namespace permsync

int main(int argc, char** argv) {
  using namespace permsync;
  std::set<int> expected;
  std::FILE* report = nullptr;
  for (int k = 1; k + 1 < argc; ++k) {
    if (std::strcmp(argv[k], "--expect-fail") == 0) expected.insert(std::atoi(argv[++k]));
    else if (std::strcmp(argv[k], "--report") == 0) report = std::fopen(argv[++k], "w");
  }
  const auto emit = [&](const std::string& text) {
    std::fputs(text.c_str(), stdout);
    std::fflush(stdout);
    if (report) {
      std::fputs(text.c_str(), report);
      std::fflush(report);
    }
  };
  SweepResult full;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"noiseless exactness", noiseless_exactness},
      {"doubly stochastic closure", doubly_stochastic_closure},
      {"propagation limit 1c^T", propagation_limit},
      {"source-only anchor block limit", source_anchor_limit},
      {"initialization independence", init_independence},
      {"full-graph sweep", [&] { return full_graph_sweep(full); }},
      {"half-edges sweep", [&] { return half_graph_sweep(full); }},
      {"distributed = centralized orthogonal iteration", centralized_equivalence},
      {"Hungarian optimality", hungarian_optimality},
      {"Procrustes recovery", procrustes_recovery},
      {"tiny-instance joint optimality", tiny_joint_optimality},
  };
  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = expected.contains(id);
    emit(std::string(o.passed ? "PASS " : "FAIL ") + (id < 10 ? " " : "") +
         std::to_string(id) + " " + criteria[k].first + ": " + o.detail +
         (!o.passed && known ? "\n    (known shortfall, see README)" : "") + "\n");
    if (!o.passed && !known) ++unexpected;
    if (o.passed && known) {
      emit("    note: criterion " + std::to_string(id) + " was expected to fail but passed\n");
    }
  }
  if (report) std::fclose(report);
  return unexpected == 0 ? 0 : 1;
}
