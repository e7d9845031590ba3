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


// Text formats shared by the CLI and tests.
//
// Instance file ('#' starts a comment, blank lines are ignored):
//   n m
//   i j                 1-based sensors; the entry is assoc(i, j)
//   <m images>          a permutation line, or
//   <m rows of m reals> a soft association
//   ...
//   truth               optional section
//   <n permutation lines>
//
// Permutation and label lines list the 1-based images pi(1) .. pi(m).
// Config files hold key = value lines grouped under [section] headers.

#ifndef PERMSYNC_INSTANCE_IO_H_
#define PERMSYNC_INSTANCE_IO_H_

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "permsync/assoc.h"
#include "permsync/graph.h"

namespace permsync {

struct Instance {
  PairwiseAssociations associations;
  std::optional<Labeling> truth;
};

// Throws ParseError naming the offending line.
Instance read_instance(std::istream& in);

// Permutation associations are written as a single line, soft ones as m
// rows printed with %.17g so they round-trip exactly.
void write_instance(std::ostream& out, const PairwiseAssociations& a,
                    const Labeling* truth = nullptr);

// Edge (j, i) for every stored assoc(i, j).
SensorGraph graph_from_associations(const PairwiseAssociations& a);

void write_labels(std::ostream& out, const Labeling& labels);
Labeling read_labels(std::istream& in);

class Config {
 public:
  // Keys outside any section live in section "".
  static Config parse(std::istream& in);

  bool has(const std::string& section, const std::string& key) const;
  // Returns the raw value; throws ConfigError if absent.
  const std::string& raw(const std::string& section,
                         const std::string& key) const;
  // Line the key was defined on, 0 if unknown.
  int line(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  // Whitespace or comma separated reals.
  std::vector<double> get_doubles(const std::string& section,
                                  const std::string& key) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  // Keys that were never read through a getter, as "section.key".
  std::vector<std::string> unused() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  const Entry* find(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

// Recovers a config embedded in an output header: lines beginning with "# "
// up to the first line that does not, with the prefix stripped.
std::string extract_header_config(std::istream& in);

}  // namespace permsync

#endif  // PERMSYNC_INSTANCE_IO_H_
