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

#include "permsync/spectral.h"

#include <cmath>
#include <cstdio>

#include <Eigen/SVD>

#include "permsync/consensus.h"

namespace permsync {

namespace {

double max_weighted_in_degree(const SensorGraph& g) {
  double best = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    double d = 0.0;
    for (int j : g.neighborhood(i)) d += g.weight(j, i);
    best = std::max(best, d);
  }
  return best;
}

}  // namespace

double inner_step_size(const SpectralConfig& cfg, const SensorGraph& g) {
  if (cfg.epsilon) return *cfg.epsilon;
  return 0.9 / (max_weighted_in_degree(g) + 1.0);
}

void validate(const SpectralConfig& cfg, const SensorGraph& g) {
  if (cfg.outer_iters < 0) throw ConfigError("outer_iters must be >= 0");
  if (cfg.inner_iters < 0) throw ConfigError("inner_iters must be >= 0");
  if (cfg.anchor < 0 || cfg.anchor >= g.size()) {
    throw ConfigError("anchor vertex out of range");
  }
  if (!(cfg.chol_jitter >= 0.0)) throw ConfigError("chol_jitter must be >= 0");
  const double eps = inner_step_size(cfg, g);
  const double dmax = max_weighted_in_degree(g);
  if (!(eps > 0.0) || (dmax > 0.0 && !(eps < 1.0 / dmax))) {
    throw ConfigError("epsilon must lie in (0, 1 / max in-degree)");
  }
}

RelaxedLabeling initial_spectral_state(int n, int m,
                                       const SpectralConfig& cfg) {
  RelaxedLabeling blocks;
  blocks.reserve(n);
  Rng rng(cfg.init_seed);
  for (int i = 0; i < n; ++i) {
    if (cfg.init == SpectralInit::kIdentity) {
      blocks.push_back(Matrix::Identity(m, m));
    } else {
      Matrix x(m, m);
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        x.data()[k] = 2.0 * uniform_real(rng) - 1.0;
      }
      blocks.push_back(std::move(x));
    }
  }
  return blocks;
}

Matrix power_node_update(int i, const Matrix& own, const Inbox& inbox,
                         const PairwiseAssociations& a) {
  Matrix y = own;
  for (const MessageView& msg : inbox) {
    accumulate_association(a.at(i, msg.sender), *msg.payload, y);
  }
  return y;
}

std::vector<Matrix> power_step(const RelaxedLabeling& state,
                               const PairwiseAssociations& a,
                               const SensorGraph& g) {
  check_covers_graph(a, g);
  const std::vector<Inbox> inboxes = local_views(g, state);
  std::vector<Matrix> y;
  y.reserve(state.size());
  for (int i = 0; i < g.size(); ++i) {
    y.push_back(power_node_update(i, state[i], inboxes[i], a));
  }
  return y;
}

Matrix inner_node_update(int i, const Matrix& own, const Inbox& inbox,
                         const SensorGraph& g, double eps) {
  // x_i + eps * (sum_j w_j x_j - d_i x_i); the weighted sum is formed first
  // so each incoming payload is read once.
  if (inbox.empty()) return own;
  Matrix sum = Matrix::Zero(own.rows(), own.cols());
  double degree = 0.0;
  for (const MessageView& msg : inbox) {
    const double w = g.weight(msg.sender, i);
    degree += w;
    if (w == 1.0) {
      sum += *msg.payload;
    } else {
      sum += w * *msg.payload;
    }
  }
  return own + eps * (sum - degree * own);
}

namespace {

Matrix exact_mean(const std::vector<Matrix>& values) {
  Matrix sum = values.front();
  for (std::size_t i = 1; i < values.size(); ++i) sum += values[i];
  return sum / static_cast<double>(values.size());
}

}  // namespace

InnerAverage inner_average(const std::vector<Matrix>& values,
                           const SensorGraph& g, const SpectralConfig& cfg) {
  if (static_cast<int>(values.size()) != g.size()) {
    throw DimensionError("inner_average: one value per sensor required");
  }
  InnerAverage out;
  if (cfg.inner_mode == InnerMode::kExactAverage) {
    out.estimates.assign(values.size(), exact_mean(values));
    return out;
  }
  if (!is_balanced(g)) {
    throw ConfigError("linear consensus averaging needs a balanced graph");
  }
  const double eps = inner_step_size(cfg, g);
  out.estimates = values;
  for (int t = 0; t < cfg.inner_iters; ++t) {
    const std::vector<Inbox> inboxes = local_views(g, out.estimates);
    std::vector<Matrix> next;
    next.reserve(values.size());
    for (int i = 0; i < g.size(); ++i) {
      next.push_back(inner_node_update(i, out.estimates[i], inboxes[i], g, eps));
    }
    out.estimates = std::move(next);
  }
  out.rounds = cfg.inner_iters;
  return out;
}

Matrix cholesky_upper(const Matrix& s) {
  const Eigen::Index m = s.rows();
  Matrix r = Matrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    double pivot = s(k, k);
    for (Eigen::Index p = 0; p < k; ++p) pivot -= r(p, k) * r(p, k);
    if (!(pivot > 0.0)) {
      throw RankDeficiencyError("cholesky: non-positive pivot at column " +
                                std::to_string(k));
    }
    r(k, k) = std::sqrt(pivot);
    for (Eigen::Index j = k + 1; j < m; ++j) {
      double v = s(k, j);
      for (Eigen::Index p = 0; p < k; ++p) v -= r(p, k) * r(p, j);
      r(k, j) = v / r(k, k);
    }
  }
  return r;
}

Matrix solve_right_upper(const Matrix& y, const Matrix& r) {
  const Eigen::Index m = r.rows();
  Matrix x(y.rows(), m);
  for (Eigen::Index row = 0; row < y.rows(); ++row) {
    for (Eigen::Index k = 0; k < m; ++k) {
      double v = y(row, k);
      for (Eigen::Index p = 0; p < k; ++p) v -= x(row, p) * r(p, k);
      x(row, k) = v / r(k, k);
    }
  }
  return x;
}

Matrix orthogonalize(const Matrix& y, const Matrix& gram,
                     const SpectralConfig& cfg) {
  if (gram.rows() != gram.cols() || gram.rows() != y.cols()) {
    throw DimensionError("orthogonalize: Gram matrix shape mismatch");
  }
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw DomainError("orthogonalize: Gram matrix is not symmetric");
  }
  Matrix r;
  try {
    r = cholesky_upper(gram);
  } catch (const RankDeficiencyError&) {
    const double m = static_cast<double>(gram.rows());
    const double shift = cfg.chol_jitter * gram.trace() / m;
    Matrix shifted = gram;
    shifted.diagonal().array() += shift;
    try {
      r = cholesky_upper(shifted);
    } catch (const RankDeficiencyError&) {
      throw RankDeficiencyError(
          "orthogonalize: Gram matrix singular even after jitter; the "
          "iterate lost rank");
    }
  }
  return solve_right_upper(y, r);
}

double gram_residual(const RelaxedLabeling& blocks) {
  const Eigen::Index m = blocks.front().cols();
  Matrix g = Matrix::Zero(m, m);
  for (const Matrix& b : blocks) g.noalias() += b.transpose() * b;
  g /= static_cast<double>(blocks.size());
  return (g - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
}

namespace {

std::vector<Matrix> local_grams(const std::vector<Matrix>& y) {
  std::vector<Matrix> z;
  z.reserve(y.size());
  for (const Matrix& yi : y) z.push_back(yi.transpose() * yi);
  return z;
}

std::optional<double> maybe_accuracy(const RelaxedLabeling& blocks,
                                     const Labeling* truth,
                                     const SpectralConfig& cfg) {
  if (!truth || !cfg.trace_accuracy) return std::nullopt;
  try {
    return accuracy(round_spectral(procrustes_correct(blocks, cfg.anchor)),
                    *truth, cfg.anchor);
  } catch (const RankDeficiencyError&) {
    return std::nullopt;
  }
}

void check_state(const RelaxedLabeling& state, const PairwiseAssociations& a,
                 const SensorGraph& g) {
  if (static_cast<int>(state.size()) != g.size()) {
    throw DimensionError("spectral: one block per sensor required");
  }
  for (const Matrix& b : state) {
    if (b.rows() != a.targets() || b.cols() != a.targets()) {
      throw DimensionError("spectral: block size differs from target count");
    }
  }
  check_covers_graph(a, g);
}

}  // namespace

SpectralResult run_doi(const PairwiseAssociations& a, const SensorGraph& g,
                       const SpectralConfig& cfg, const Labeling* truth,
                       const SpectralObserver& observer) {
  return run_doi_from(initial_spectral_state(g.size(), a.targets(), cfg), a, g,
                      cfg, truth, observer);
}

SpectralResult run_doi_from(RelaxedLabeling state,
                            const PairwiseAssociations& a,
                            const SensorGraph& g, const SpectralConfig& cfg,
                            const Labeling* truth,
                            const SpectralObserver& observer) {
  validate(cfg, g);
  check_state(state, a, g);
  SpectralResult out;
  for (int t = 1; t <= cfg.outer_iters; ++t) {
    const std::vector<Matrix> y = power_step(state, a, g);
    const InnerAverage avg = inner_average(local_grams(y), g, cfg);
    for (int i = 0; i < g.size(); ++i) {
      state[i] = orthogonalize(y[i], avg.estimates[i], cfg);
    }
    out.trace.push_back({t, avg.rounds, gram_residual(state),
                         maybe_accuracy(state, truth, cfg)});
    if (observer) observer(t, state);
  }
  out.relaxed = std::move(state);
  return out;
}

NetworkedSpectral run_doi_networked(const PairwiseAssociations& a,
                                    const SensorGraph& g,
                                    const SpectralConfig& cfg) {
  validate(cfg, g);
  RelaxedLabeling state = initial_spectral_state(g.size(), a.targets(), cfg);
  check_state(state, a, g);
  if (cfg.inner_mode == InnerMode::kLinearConsensus && !is_balanced(g)) {
    throw ConfigError("linear consensus averaging needs a balanced graph");
  }
  const double eps = inner_step_size(cfg, g);
  SyncNetwork net(g);
  NetworkedSpectral out;
  for (int t = 1; t <= cfg.outer_iters; ++t) {
    std::vector<Inbox> inboxes = net.exchange(state, "power");
    std::vector<Matrix> y;
    y.reserve(state.size());
    for (int i = 0; i < g.size(); ++i) {
      y.push_back(power_node_update(i, state[i], inboxes[i], a));
    }
    std::vector<Matrix> z = local_grams(y);
    int rounds = 0;
    if (cfg.inner_mode == InnerMode::kExactAverage) {
      net.record_oracle_round("gram");
      z.assign(z.size(), exact_mean(z));
    } else {
      for (; rounds < cfg.inner_iters; ++rounds) {
        inboxes = net.exchange(z, "gram");
        std::vector<Matrix> next;
        next.reserve(z.size());
        for (int i = 0; i < g.size(); ++i) {
          next.push_back(inner_node_update(i, z[i], inboxes[i], g, eps));
        }
        z = std::move(next);
      }
    }
    for (int i = 0; i < g.size(); ++i) {
      state[i] = orthogonalize(y[i], z[i], cfg);
    }
    out.result.trace.push_back({t, rounds, gram_residual(state), std::nullopt});
  }
  out.result.relaxed = std::move(state);
  out.stats = net.stats();
  return out;
}

RelaxedLabeling procrustes_correct(const RelaxedLabeling& blocks, int anchor) {
  if (anchor < 0 || anchor >= static_cast<int>(blocks.size())) {
    throw DomainError("procrustes_correct: anchor out of range");
  }
  const Matrix& pa = blocks[anchor];
  Matrix q;
  if (auto p = permutation_of(pa)) {
    // Exact inverse; the SVD route would leave rounding noise.
    q = matrix_of(inverse(*p));
  } else {
    Eigen::JacobiSVD<Matrix> svd(pa, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-12 * std::max(1.0, s(0)))) {
      throw RankDeficiencyError("procrustes_correct: anchor block is singular");
    }
    q = svd.matrixV() * svd.matrixU().transpose();
  }
  RelaxedLabeling out;
  out.reserve(blocks.size());
  for (const Matrix& b : blocks) out.push_back(b * q);
  return out;
}

Labeling round_spectral(const RelaxedLabeling& blocks) {
  return round_labels(blocks);
}

Labeling solve_spectral(const PairwiseAssociations& a, const SensorGraph& g,
                        const SpectralConfig& cfg) {
  const SpectralResult r = run_doi(a, g, cfg);
  return round_spectral(procrustes_correct(r.relaxed, cfg.anchor));
}

void write_spectral_trace(std::ostream& out,
                          std::span<const SpectralTraceRow> trace) {
  out << "outer,inner_rounds,gram_residual,accuracy\n";
  char buf[64];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", row.gram_residual);
    out << row.outer << ',' << row.inner_rounds << ',' << buf << ',';
    if (row.accuracy) {
      std::snprintf(buf, sizeof buf, "%.17g", *row.accuracy);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace permsync
