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


// Monte Carlo sweeps over the outlier fraction: for every (p, trial) a
// synthetic instance is generated, both protocols are run and the rounded
// labels are scored against the ground truth.

#ifndef PERMSYNC_EXPERIMENT_H_
#define PERMSYNC_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "permsync/consensus.h"
#include "permsync/graph.h"
#include "permsync/instance_io.h"
#include "permsync/spectral.h"

namespace permsync {

struct ExperimentSpec {
  std::uint64_t seed = 1;
  int trials = 10;
  int sensors = 20;
  int targets = 50;
  GraphKind graph = GraphKind::kComplete;
  double edge_fraction = 1.0;
  std::vector<double> outliers;
  bool run_cs = true;
  bool run_sp = true;
  ConsensusConfig consensus;
  SpectralConfig spectral;
};

// Reads [experiment], [consensus] and [spectral]. Sensor indices in the file
// are 1-based. Throws ParseError (with the line) on bad values or unknown
// keys. An [output] section is accepted and ignored here.
ExperimentSpec spec_from_config(const Config& cfg);

// Canonical config text; spec_from_config(parse(text)) gives back `spec`.
std::string spec_to_config(const ExperimentSpec& spec);

// Independent stream for trial `trial` at outlier index `point`.
std::uint64_t trial_seed(std::uint64_t master, int point, int trial);

struct TrialResult {
  double p = 0.0;
  int point = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t edges = 0;
  std::optional<double> acc_cs;
  std::optional<double> acc_sp;
  int cs_rounds = 0;
  bool cs_converged = true;
};

TrialResult run_trial(const ExperimentSpec& spec, int point, int trial);

struct SummaryRow {
  double p = 0.0;
  std::optional<double> mean_cs;
  std::optional<double> mean_sp;
};

struct SweepResult {
  std::vector<TrialResult> trials;  // point-major, trial-minor
  std::vector<SummaryRow> summary;  // one row per outlier fraction
};

// Trials run on `threads` workers; results do not depend on the count.
SweepResult run_sweep(const ExperimentSpec& spec, int threads = 1);

// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

// Space-separated "p mean_cs mean_sp" table preceded by the config as
// "# " comment lines.
void write_summary(std::ostream& out, const ExperimentSpec& spec,
                   const SweepResult& result);

// One CSV row per trial, same comment header.
void write_trials(std::ostream& out, const ExperimentSpec& spec,
                  const SweepResult& result);

}  // namespace permsync

#endif  // PERMSYNC_EXPERIMENT_H_
