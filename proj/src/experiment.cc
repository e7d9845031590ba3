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


#include "permsync/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "permsync/assoc.h"

namespace permsync {
namespace {

[[noreturn]] void bad_value(const Config& cfg, const std::string& section,
                            const std::string& key, const std::string& why) {
  throw ParseError(key + ": " + why, cfg.line(section, key));
}

int get_count(const Config& cfg, const std::string& section,
              const std::string& key, int fallback, int lo) {
  const long long v = cfg.get_int(section, key, fallback);
  if (v < lo || v > 1000000000) {
    bad_value(cfg, section, key, "must be >= " + std::to_string(lo));
  }
  return static_cast<int>(v);
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ' ';
    out += format_real(v[k]);
  }
  return out;
}

std::string inner_mode_name(InnerMode mode) {
  return mode == InnerMode::kExactAverage ? "exact_average"
                                          : "linear_consensus";
}

std::string methods_text(const ExperimentSpec& spec) {
  if (spec.run_cs && spec.run_sp) return "cs sp";
  return spec.run_cs ? "cs" : "sp";
}

void write_header(std::ostream& out, const ExperimentSpec& spec,
                  const std::string& title) {
  out << "# # permsync sweep " << title << '\n';
  std::istringstream text(spec_to_config(spec));
  std::string line;
  while (std::getline(text, line)) out << "# " << line << '\n';
}

std::string optional_real(const std::optional<double>& v) {
  return v ? format_real(*v) : "nan";
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ExperimentSpec spec_from_config(const Config& cfg) {
  ExperimentSpec s;
  const std::string ex = "experiment";
  const long long seed = cfg.get_int(ex, "seed", 1);
  if (seed < 0) bad_value(cfg, ex, "seed", "must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.trials = get_count(cfg, ex, "trials", s.trials, 1);
  s.sensors = get_count(cfg, ex, "sensors", s.sensors, 1);
  s.targets = get_count(cfg, ex, "targets", s.targets, 1);

  const std::string kind = cfg.get_string(ex, "graph", "complete");
  if (kind == "complete") {
    s.graph = GraphKind::kComplete;
  } else if (kind == "random_subset") {
    s.graph = GraphKind::kRandomSubset;
  } else {
    bad_value(cfg, ex, "graph", "expected complete or random_subset");
  }
  s.edge_fraction = cfg.get_double(ex, "edge_fraction", 1.0);
  if (!(s.edge_fraction > 0.0 && s.edge_fraction <= 1.0)) {
    bad_value(cfg, ex, "edge_fraction", "must lie in (0, 1]");
  }
  if (!cfg.has(ex, "outliers")) {
    throw ParseError("missing key experiment.outliers", 0);
  }
  s.outliers = cfg.get_doubles(ex, "outliers");
  if (s.outliers.empty()) bad_value(cfg, ex, "outliers", "empty list");
  for (double p : s.outliers) {
    if (!(p >= 0.0 && p <= 1.0)) {
      bad_value(cfg, ex, "outliers", "fractions must lie in [0, 1]");
    }
  }
  std::string methods = cfg.get_string(ex, "methods", "cs sp");
  std::replace(methods.begin(), methods.end(), ',', ' ');
  std::istringstream mt(methods);
  s.run_cs = s.run_sp = false;
  for (std::string tok; mt >> tok;) {
    if (tok == "cs") {
      s.run_cs = true;
    } else if (tok == "sp") {
      s.run_sp = true;
    } else {
      bad_value(cfg, ex, "methods", "expected cs and/or sp");
    }
  }
  if (!s.run_cs && !s.run_sp) bad_value(cfg, ex, "methods", "empty list");

  const std::string cs = "consensus";
  s.consensus.max_iters = get_count(cfg, cs, "max_iters", s.consensus.max_iters, 0);
  s.consensus.conv_tol = cfg.get_double(cs, "conv_tol", s.consensus.conv_tol);
  if (!(s.consensus.conv_tol > 0.0)) {
    bad_value(cfg, cs, "conv_tol", "must be positive");
  }
  const int distinguished = get_count(cfg, cs, "distinguished", 1, 1);
  if (distinguished > s.sensors) {
    bad_value(cfg, cs, "distinguished", "exceeds the sensor count");
  }
  s.consensus.distinguished = distinguished - 1;

  const std::string sp = "spectral";
  s.spectral.outer_iters = get_count(cfg, sp, "outer_iters", s.spectral.outer_iters, 1);
  s.spectral.inner_iters = get_count(cfg, sp, "inner_iters", s.spectral.inner_iters, 0);
  const std::string mode = cfg.get_string(sp, "inner_mode", "linear_consensus");
  if (mode == "linear_consensus") {
    s.spectral.inner_mode = InnerMode::kLinearConsensus;
  } else if (mode == "exact_average") {
    s.spectral.inner_mode = InnerMode::kExactAverage;
  } else {
    bad_value(cfg, sp, "inner_mode", "expected linear_consensus or exact_average");
  }
  const std::string eps = cfg.get_string(sp, "epsilon", "auto");
  if (eps != "auto") {
    const double v = cfg.get_double(sp, "epsilon", 0.0);
    if (!(v > 0.0)) bad_value(cfg, sp, "epsilon", "must be positive or auto");
    s.spectral.epsilon = v;
  }
  const int anchor = get_count(cfg, sp, "anchor", 1, 1);
  if (anchor > s.sensors) bad_value(cfg, sp, "anchor", "exceeds the sensor count");
  s.spectral.anchor = anchor - 1;

  // Output paths belong to the caller.
  cfg.get_string("output", "summary", "");
  cfg.get_string("output", "trials", "");
  for (const std::string& key : cfg.unused()) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    throw ParseError("unknown key " + key, cfg.line(section, name));
  }
  return s;
}

std::string spec_to_config(const ExperimentSpec& s) {
  std::ostringstream out;
  out << "[experiment]\n"
      << "seed = " << s.seed << '\n'
      << "trials = " << s.trials << '\n'
      << "sensors = " << s.sensors << '\n'
      << "targets = " << s.targets << '\n'
      << "graph = "
      << (s.graph == GraphKind::kComplete ? "complete" : "random_subset") << '\n'
      << "edge_fraction = " << format_real(s.edge_fraction) << '\n'
      << "outliers = " << join_reals(s.outliers) << '\n'
      << "methods = " << methods_text(s) << '\n'
      << "\n[consensus]\n"
      << "max_iters = " << s.consensus.max_iters << '\n'
      << "conv_tol = " << format_real(s.consensus.conv_tol) << '\n'
      << "distinguished = " << s.consensus.distinguished + 1 << '\n'
      << "\n[spectral]\n"
      << "outer_iters = " << s.spectral.outer_iters << '\n'
      << "inner_mode = " << inner_mode_name(s.spectral.inner_mode) << '\n'
      << "inner_iters = " << s.spectral.inner_iters << '\n'
      << "epsilon = "
      << (s.spectral.epsilon ? format_real(*s.spectral.epsilon) : "auto") << '\n'
      << "anchor = " << s.spectral.anchor + 1 << '\n';
  return out.str();
}

std::uint64_t trial_seed(std::uint64_t master, int point, int trial) {
  return split_seed(master, (static_cast<std::uint64_t>(point) << 32) |
                                static_cast<std::uint32_t>(trial));
}

TrialResult run_trial(const ExperimentSpec& spec, int point, int trial) {
  TrialResult r;
  r.p = spec.outliers.at(point);
  r.point = point;
  r.trial = trial;
  r.seed = trial_seed(spec.seed, point, trial);
  Rng rng(r.seed);
  const SensorGraph g =
      gen_graph(spec.graph, spec.sensors, spec.edge_fraction, rng);
  r.edges = g.edge_count();
  const SyntheticInstance inst =
      generate_synthetic(g, spec.targets, r.p, rng);
  if (spec.run_cs) {
    const ConsensusResult cs = run_consensus(inst.associations, g, spec.consensus);
    r.cs_rounds = cs.rounds;
    r.cs_converged = cs.converged;
    r.acc_cs = accuracy(round_labels(cs.relaxed), inst.truth,
                        spec.consensus.distinguished);
  }
  if (spec.run_sp) {
    r.acc_sp = accuracy(solve_spectral(inst.associations, g, spec.spectral),
                        inst.truth, spec.spectral.anchor);
  }
  return r;
}

SweepResult run_sweep(const ExperimentSpec& spec, int threads) {
  const int points = static_cast<int>(spec.outliers.size());
  const std::size_t total = static_cast<std::size_t>(points) * spec.trials;
  SweepResult out;
  out.trials.resize(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t k = next++; k < total; k = next++) {
        out.trials[k] = run_trial(spec, static_cast<int>(k / spec.trials),
                                  static_cast<int>(k % spec.trials));
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = total;
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  for (int pt = 0; pt < points; ++pt) {
    SummaryRow row{spec.outliers[pt], std::nullopt, std::nullopt};
    double cs = 0.0, sp = 0.0;
    for (int t = 0; t < spec.trials; ++t) {
      const TrialResult& r = out.trials[static_cast<std::size_t>(pt) * spec.trials + t];
      if (r.acc_cs) cs += *r.acc_cs;
      if (r.acc_sp) sp += *r.acc_sp;
    }
    if (spec.run_cs) row.mean_cs = cs / spec.trials;
    if (spec.run_sp) row.mean_sp = sp / spec.trials;
    out.summary.push_back(row);
  }
  return out;
}

void write_summary(std::ostream& out, const ExperimentSpec& spec,
                   const SweepResult& result) {
  write_header(out, spec, "summary");
  out << "p mean_cs mean_sp\n";
  for (const SummaryRow& row : result.summary) {
    out << format_real(row.p) << ' ' << optional_real(row.mean_cs) << ' '
        << optional_real(row.mean_sp) << '\n';
  }
}

void write_trials(std::ostream& out, const ExperimentSpec& spec,
                  const SweepResult& result) {
  write_header(out, spec, "trials");
  out << "p,trial,seed,edges,acc_cs,acc_sp,cs_rounds,cs_converged\n";
  for (const TrialResult& r : result.trials) {
    out << format_real(r.p) << ',' << r.trial + 1 << ',' << r.seed << ','
        << r.edges << ',' << optional_real(r.acc_cs) << ','
        << optional_real(r.acc_sp) << ',' << r.cs_rounds << ','
        << (r.cs_converged ? 1 : 0) << '\n';
  }
}

}  // namespace permsync
