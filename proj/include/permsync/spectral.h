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

// Distributed orthogonal iteration on the block association matrix.
//
// One outer round at sensor i:
//   Y_i  = P_i + sum_{j in N_i} assoc(i, j) P_j          (power step)
//   Z_i  = Y_i^T Y_i, averaged over the network          (inner consensus)
//   R_i  = chol(avg Z)                                   (local)
//   P_i <- Y_i R_i^-1                                    (local)
//
// With exact averaging the stacked blocks satisfy (1/n) sum_i P_i^T P_i = I,
// i.e. the stacked matrix is sqrt(n) times an orthonormal basis and each
// block has the scale of a permutation matrix. The remaining O(m) ambiguity
// is removed once at the end by an orthogonal Procrustes alignment of the
// anchor block, followed by Hungarian rounding.

#ifndef PERMSYNC_SPECTRAL_H_
#define PERMSYNC_SPECTRAL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "permsync/assoc.h"
#include "permsync/common.h"
#include "permsync/graph.h"
#include "permsync/simnet.h"

namespace permsync {

enum class InnerMode {
  // Centralized mean; stands in for a perfect inner consensus.
  kExactAverage,
  // x <- (I - eps L) x for inner_iters rounds; needs a balanced graph.
  kLinearConsensus,
};

enum class SpectralInit { kIdentity, kRandom };

struct SpectralConfig {
  int outer_iters = 100;
  InnerMode inner_mode = InnerMode::kLinearConsensus;
  int inner_iters = 50;
  // Inner consensus step. Defaults to 0.9 / (max in-degree + 1).
  std::optional<double> epsilon;
  double chol_jitter = 1e-10;
  int anchor = 0;
  SpectralInit init = SpectralInit::kIdentity;
  std::uint64_t init_seed = 0;
  bool trace_accuracy = false;
};

// Throws ConfigError on invalid iteration counts, anchor, or an epsilon
// outside (0, 1 / max in-degree).
void validate(const SpectralConfig& cfg, const SensorGraph& g);

double inner_step_size(const SpectralConfig& cfg, const SensorGraph& g);

RelaxedLabeling initial_spectral_state(int n, int m, const SpectralConfig& cfg);

// Y_i for one sensor: own block first, then neighbours in inbox order.
Matrix power_node_update(int i, const Matrix& own, const Inbox& inbox,
                         const PairwiseAssociations& a);

// Y_i = sum_{j in N_i + {i}} assoc(i, j) P_j for every sensor.
std::vector<Matrix> power_step(const RelaxedLabeling& state,
                               const PairwiseAssociations& a,
                               const SensorGraph& g);

// One linear consensus round for one sensor:
// x_i + eps * sum_j w(j, i) (x_j - x_i), neighbours in inbox order.
Matrix inner_node_update(int i, const Matrix& own, const Inbox& inbox,
                         const SensorGraph& g, double eps);

struct InnerAverage {
  std::vector<Matrix> estimates;
  int rounds = 0;  // 0 for exact averaging
};

// Per-sensor estimates of the mean of `values`. Throws ConfigError when
// linear consensus is requested on an unbalanced graph.
InnerAverage inner_average(const std::vector<Matrix>& values,
                           const SensorGraph& g, const SpectralConfig& cfg);

// Upper-triangular R with positive diagonal and R^T R = s. Throws
// RankDeficiencyError on a non-positive pivot.
Matrix cholesky_upper(const Matrix& s);

// Solves X R = Y for upper-triangular R.
Matrix solve_right_upper(const Matrix& y, const Matrix& r);

// Y R^-1 with R = chol(gram). On failure retries once with
// chol_jitter * trace(gram) / m added to the diagonal; a second failure is
// rethrown as RankDeficiencyError. Throws DomainError if gram is not
// symmetric to 1e-8 relative to its largest entry.
Matrix orthogonalize(const Matrix& y, const Matrix& gram,
                     const SpectralConfig& cfg);

// max |(1/n) sum_i P_i^T P_i - I|.
double gram_residual(const RelaxedLabeling& blocks);

struct SpectralTraceRow {
  int outer;
  int inner_rounds;
  double gram_residual;
  std::optional<double> accuracy;
};

struct SpectralResult {
  RelaxedLabeling relaxed;
  std::vector<SpectralTraceRow> trace;
};

// Called after every outer round with the round number (1-based) and the
// orthogonalized blocks.
using SpectralObserver = std::function<void(int, const RelaxedLabeling&)>;

// outer_iters rounds of power_step, inner_average and orthogonalize, starting
// from initial_spectral_state. Returns the blocks before Procrustes
// alignment.
SpectralResult run_doi(const PairwiseAssociations& a, const SensorGraph& g,
                       const SpectralConfig& cfg,
                       const Labeling* truth = nullptr,
                       const SpectralObserver& observer = {});

SpectralResult run_doi_from(RelaxedLabeling state,
                            const PairwiseAssociations& a,
                            const SensorGraph& g, const SpectralConfig& cfg,
                            const Labeling* truth = nullptr,
                            const SpectralObserver& observer = {});

struct NetworkedSpectral {
  SpectralResult result;
  std::vector<RoundStats> stats;
};

// run_doi through SyncNetwork. In exact-average mode the Gram exchange is
// recorded as an oracle round and excluded from the traffic count.
NetworkedSpectral run_doi_networked(const PairwiseAssociations& a,
                                    const SensorGraph& g,
                                    const SpectralConfig& cfg);

// Right-multiplies every block by Q = V U^T, where U S V^T is the SVD of the
// anchor block, so the anchor block becomes the closest it can get to I.
// Throws RankDeficiencyError if the anchor block is singular.
RelaxedLabeling procrustes_correct(const RelaxedLabeling& blocks, int anchor);

// Hungarian rounding, shared with the consensus protocol.
Labeling round_spectral(const RelaxedLabeling& blocks);

// run_doi + procrustes_correct + round_spectral.
Labeling solve_spectral(const PairwiseAssociations& a, const SensorGraph& g,
                        const SpectralConfig& cfg);

// CSV with header "outer,inner_rounds,gram_residual,accuracy".
void write_spectral_trace(std::ostream& out,
                          std::span<const SpectralTraceRow> trace);

}  // namespace permsync

#endif  // PERMSYNC_SPECTRAL_H_
