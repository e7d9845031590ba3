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


// permsync: sweeps, single runs, property checks and instance generation.
// Exit codes: 0 success, 1 input error or failed check, 2 non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "permsync/assoc.h"
#include "permsync/consensus.h"
#include "permsync/experiment.h"
#include "permsync/graph.h"
#include "permsync/instance_io.h"
#include "permsync/spectral.h"
#include "permsync/verify.h"

namespace {

using namespace permsync;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNoConvergence = 2;

class InputError : public Error {
 public:
  using Error::Error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

// Re-raises a parse failure with the file name in front.
template <typename F>
auto with_file(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

InnerMode parse_inner_mode(const std::string& s) {
  if (s == "exact_average") return InnerMode::kExactAverage;
  if (s == "linear_consensus") return InnerMode::kLinearConsensus;
  throw InputError("unknown inner mode '" + s + "'");
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string config;
  bool from_header = false;
  std::string out;
  std::string trials_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string method;
  std::string inner_mode;
  std::optional<int> max_iters;
  int threads = 1;
};

int cmd_sweep(const SweepArgs& args) {
  std::string text;
  {
    std::ifstream in = open_in(args.config);
    if (args.from_header) {
      text = extract_header_config(in);
    } else {
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
  }
  std::istringstream in(text);
  const Config cfg = with_file(args.config, [&] { return Config::parse(in); });
  ExperimentSpec spec = with_file(args.config, [&] { return spec_from_config(cfg); });

  if (args.seed) spec.seed = *args.seed;
  if (args.trials) {
    if (*args.trials < 1) throw InputError("--trials must be positive");
    spec.trials = *args.trials;
  }
  if (!args.method.empty()) {
    spec.run_cs = args.method == "cs" || args.method == "both";
    spec.run_sp = args.method == "sp" || args.method == "both";
  }
  if (!args.inner_mode.empty()) spec.spectral.inner_mode = parse_inner_mode(args.inner_mode);
  if (args.max_iters) spec.consensus.max_iters = *args.max_iters;

  std::string summary_path = args.out;
  if (summary_path.empty()) summary_path = cfg.get_string("output", "summary", "");
  if (summary_path.empty()) summary_path = "sweep_summary.txt";
  std::string trials_path = args.trials_out;
  if (trials_path.empty() && args.out.empty()) {
    trials_path = cfg.get_string("output", "trials", "");
  }
  if (trials_path.empty()) trials_path = summary_path + ".trials.csv";

  const SweepResult result = run_sweep(spec, args.threads);
  {
    std::ofstream out = open_out(summary_path);
    write_summary(out, spec, result);
  }
  {
    std::ofstream out = open_out(trials_path);
    write_trials(out, spec, result);
  }
  for (const SummaryRow& row : result.summary) {
    std::printf("p=%-5s cs=%-10s sp=%s\n", format_real(row.p).c_str(),
                row.mean_cs ? format_real(*row.mean_cs).c_str() : "-",
                row.mean_sp ? format_real(*row.mean_sp).c_str() : "-");
  }
  return kOk;
}

// ------------------------------------------------------------------ run

struct RunArgs {
  std::string instance;
  std::string graph;
  std::string method = "cs";
  std::string out;
  std::uint64_t seed = 0;
  std::optional<int> max_iters;
  std::string inner_mode = "linear_consensus";
  int inner_iters = 50;
  int anchor = 1;
  std::string init = "identity";
  std::string stats;
};

void write_run_header(std::ostream& out, const RunArgs& a) {
  out << "# # permsync run\n"
      << "# instance = " << a.instance << '\n'
      << "# graph = " << (a.graph.empty() ? "derived" : a.graph) << '\n'
      << "# method = " << a.method << '\n'
      << "# seed = " << a.seed << '\n'
      << "# anchor = " << a.anchor << '\n'
      << "# init = " << a.init << '\n';
  if (a.max_iters) out << "# max_iters = " << *a.max_iters << '\n';
  if (a.method == "sp") {
    out << "# inner_mode = " << a.inner_mode << '\n'
        << "# inner_iters = " << a.inner_iters << '\n';
  }
}

int cmd_run(const RunArgs& args) {
  Instance inst = [&] {
    std::ifstream in = open_in(args.instance);
    return with_file(args.instance, [&] { return read_instance(in); });
  }();
  const PairwiseAssociations& a = inst.associations;
  SensorGraph g = graph_from_associations(a);
  if (!args.graph.empty()) {
    std::ifstream in = open_in(args.graph);
    g = with_file(args.graph, [&] { return read_graph(in); });
  }
  if (g.size() != a.sensors()) throw InputError("graph and instance sizes differ");
  if (args.anchor < 1 || args.anchor > a.sensors()) {
    throw InputError("--anchor out of range");
  }
  const Labeling* truth = inst.truth ? &*inst.truth : nullptr;

  Labeling labels;
  std::ostringstream trace;
  bool converged = true;
  std::vector<RoundStats> stats;
  if (args.method == "cs") {
    ConsensusConfig cfg;
    cfg.distinguished = args.anchor - 1;
    if (args.max_iters) cfg.max_iters = *args.max_iters;
    cfg.init_seed = args.seed;
    if (args.init == "identity") {
      cfg.init = ConsensusInit::kIdentity;
    } else if (args.init == "uniform") {
      cfg.init = ConsensusInit::kUniform;
    } else if (args.init == "random") {
      cfg.init = ConsensusInit::kRandomPermutation;
    } else {
      throw InputError("unknown init '" + args.init + "'");
    }
    cfg.trace_accuracy = truth != nullptr;
    if (!args.stats.empty()) {
      NetworkedConsensus net = run_consensus_networked(a, g, cfg);
      stats = std::move(net.stats);
      converged = net.result.converged;
      labels = round_labels(net.result.relaxed);
      write_consensus_trace(trace, net.result.trace);
    } else {
      const ConsensusResult res = run_consensus(a, g, cfg, truth);
      converged = res.converged;
      labels = round_labels(res.relaxed);
      write_consensus_trace(trace, res.trace);
    }
  } else if (args.method == "sp") {
    SpectralConfig cfg;
    cfg.anchor = args.anchor - 1;
    if (args.max_iters) cfg.outer_iters = *args.max_iters;
    cfg.inner_mode = parse_inner_mode(args.inner_mode);
    cfg.inner_iters = args.inner_iters;
    cfg.init_seed = args.seed;
    if (args.init == "identity") {
      cfg.init = SpectralInit::kIdentity;
    } else if (args.init == "random") {
      cfg.init = SpectralInit::kRandom;
    } else {
      throw InputError("unknown init '" + args.init + "' for sp");
    }
    cfg.trace_accuracy = truth != nullptr;
    SpectralResult res;
    if (!args.stats.empty()) {
      NetworkedSpectral net = run_doi_networked(a, g, cfg);
      stats = std::move(net.stats);
      res = std::move(net.result);
    } else {
      res = run_doi(a, g, cfg, truth);
    }
    labels = round_spectral(procrustes_correct(res.relaxed, cfg.anchor));
    write_spectral_trace(trace, res.trace);
  } else {
    throw InputError("unknown method '" + args.method + "' (expected cs or sp)");
  }

  if (args.out.empty()) {
    write_labels(std::cout, labels);
  } else {
    {
      std::ofstream out = open_out(args.out + ".labels");
      write_run_header(out, args);
      write_labels(out, labels);
    }
    {
      std::ofstream out = open_out(args.out + ".trace.csv");
      write_run_header(out, args);
      out << trace.str();
    }
  }
  if (!args.stats.empty()) {
    std::ofstream out = open_out(args.stats);
    write_run_header(out, args);
    write_stats_csv(out, stats);
  }
  if (truth) {
    std::fprintf(stderr, "accuracy %s\n",
                 format_real(accuracy(labels, *truth, args.anchor - 1)).c_str());
  }
  if (!converged) {
    std::fprintf(stderr, "consensus did not converge\n");
    return kNoConvergence;
  }
  return kOk;
}

// --------------------------------------------------------------- verify

int cmd_verify(const std::string& suite, std::uint64_t seed, int instances) {
  const std::vector<CheckResult> results = run_verify(suite, seed, instances);
  bool ok = true;
  for (const CheckResult& r : results) {
    std::printf("%s  %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kOk : kInputError;
}

// ------------------------------------------------------------------ gen

struct GenArgs {
  int sensors = 5;
  int targets = 4;
  double outliers = 0.0;
  std::string graph = "complete";
  double edge_fraction = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  bool no_truth = false;
};

int cmd_gen(const GenArgs& args) {
  GraphKind kind;
  if (args.graph == "complete") {
    kind = GraphKind::kComplete;
  } else if (args.graph == "random_subset") {
    kind = GraphKind::kRandomSubset;
  } else {
    throw InputError("unknown graph kind '" + args.graph + "'");
  }
  if (args.sensors < 2 || args.targets < 1) {
    throw InputError("need at least 2 sensors and 1 target");
  }
  if (!(args.outliers >= 0.0 && args.outliers <= 1.0)) {
    throw InputError("--outliers must lie in [0, 1]");
  }
  Rng rng(args.seed);
  const SensorGraph g = gen_graph(kind, args.sensors, args.edge_fraction, rng);
  const SyntheticInstance inst = generate_synthetic(g, args.targets, args.outliers, rng);
  std::ostringstream text;
  text << "# # permsync gen\n"
       << "# sensors = " << args.sensors << '\n'
       << "# targets = " << args.targets << '\n'
       << "# outliers = " << format_real(args.outliers) << '\n'
       << "# graph = " << args.graph << '\n'
       << "# edge_fraction = " << format_real(args.edge_fraction) << '\n'
       << "# seed = " << args.seed << '\n';
  write_instance(text, inst.associations, args.no_truth ? nullptr : &inst.truth);
  if (args.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out = open_out(args.out);
    out << text.str();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed permutation synchronization: consensus and spectral"};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy sweep over outlier fractions");
  sweep_cmd->add_option("config", sweep.config, "Config file")->required();
  sweep_cmd->add_flag("--from-header", sweep.from_header,
                      "Read the config embedded in a previous output file");
  sweep_cmd->add_option("--out", sweep.out, "Summary file");
  sweep_cmd->add_option("--trials-out", sweep.trials_out, "Per-trial CSV");
  sweep_cmd->add_option("--seed", sweep.seed, "Master seed");
  sweep_cmd->add_option("--trials", sweep.trials, "Trials per outlier fraction");
  sweep_cmd->add_option("--method", sweep.method, "cs, sp or both")
      ->check(CLI::IsMember({"cs", "sp", "both"}));
  sweep_cmd->add_option("--inner-mode", sweep.inner_mode,
                        "linear_consensus or exact_average");
  sweep_cmd->add_option("--max-iters", sweep.max_iters, "Consensus round cap");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Solve one instance file");
  run_cmd->add_option("instance", run.instance, "Instance file")->required();
  run_cmd->add_option("--method", run.method, "cs or sp");
  run_cmd->add_option("--graph", run.graph, "Graph file (default: from entries)");
  run_cmd->add_option("--out", run.out, "Output prefix for .labels and .trace.csv");
  run_cmd->add_option("--seed", run.seed, "Seed for random initialisation");
  run_cmd->add_option("--max-iters", run.max_iters,
                      "Consensus round cap, or outer iterations for sp");
  run_cmd->add_option("--inner-mode", run.inner_mode, "linear_consensus or exact_average");
  run_cmd->add_option("--inner-iters", run.inner_iters, "Inner consensus rounds");
  run_cmd->add_option("--anchor", run.anchor, "Anchor sensor (1-based)");
  run_cmd->add_option("--init", run.init, "identity, uniform or random");
  run_cmd->add_option("--stats", run.stats, "Per-round traffic CSV");

  std::string suite;
  std::uint64_t verify_seed = 1;
  int verify_instances = 50;
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite");
  verify_cmd->add_option("suite", suite, "lemmas, theorems, equivalence or assignment")
      ->required();
  verify_cmd->add_option("--seed", verify_seed, "Master seed");
  verify_cmd->add_option("--trials", verify_instances, "Instances per check");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic instance");
  gen_cmd->add_option("--sensors,-n", gen.sensors, "Number of sensors");
  gen_cmd->add_option("--targets,-m", gen.targets, "Number of targets");
  gen_cmd->add_option("--outliers,-p", gen.outliers, "Outlier fraction");
  gen_cmd->add_option("--graph", gen.graph, "complete or random_subset");
  gen_cmd->add_option("--edge-fraction", gen.edge_fraction, "Kept pair fraction");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Output file (default stdout)");
  gen_cmd->add_flag("--no-truth", gen.no_truth, "Omit the truth section");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*run_cmd) return cmd_run(run);
    if (*verify_cmd) return cmd_verify(suite, verify_seed, verify_instances);
    if (*gen_cmd) return cmd_gen(gen);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "permsync: %s\n", e.what());
    return kInputError;
  }
  return kInputError;
}
