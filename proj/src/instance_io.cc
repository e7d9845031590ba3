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


#include "permsync/instance_io.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace permsync {
namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Non-blank lines with comments removed.
std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (const auto hash = text.find('#'); hash != std::string::npos) {
      text.erase(hash);
    }
    auto tokens = split(text);
    if (!tokens.empty()) out.push_back({number, std::move(tokens)});
  }
  return out;
}

std::optional<long long> to_int(const std::string& s) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

long long need_int(const std::string& s, int line, const char* what) {
  const auto v = to_int(s);
  if (!v) throw ParseError(std::string("expected integer ") + what, line);
  return *v;
}

// Images as a 0-based permutation if the tokens are a bijection of 1..m.
std::optional<Permutation> as_permutation(const std::vector<std::string>& t) {
  const int m = static_cast<int>(t.size());
  std::vector<int> images;
  std::vector<bool> seen(m, false);
  for (const auto& s : t) {
    const auto v = to_int(s);
    if (!v || *v < 1 || *v > m || seen[*v - 1]) return std::nullopt;
    seen[*v - 1] = true;
    images.push_back(static_cast<int>(*v - 1));
  }
  return Permutation(std::move(images));
}

Permutation need_permutation(const Line& line, int m) {
  if (static_cast<int>(line.tokens.size()) != m) {
    throw ParseError("expected " + std::to_string(m) + " images", line.number);
  }
  auto p = as_permutation(line.tokens);
  if (!p) {
    throw ParseError("images are not a permutation of 1.." + std::to_string(m),
                     line.number);
  }
  return *std::move(p);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Instance read_instance(std::istream& in) {
  const std::vector<Line> lines = tokenize(in);
  if (lines.empty()) throw ParseError("empty instance file", 0);
  const Line& head = lines.front();
  if (head.tokens.size() != 2) {
    throw ParseError("header must be 'n m'", head.number);
  }
  const long long n = need_int(head.tokens[0], head.number, "n");
  const long long m = need_int(head.tokens[1], head.number, "m");
  if (n < 1 || m < 1 || n > 100000 || m > 100000) {
    throw ParseError("n and m must be positive", head.number);
  }
  Instance out{PairwiseAssociations(static_cast<int>(n), static_cast<int>(m)),
               std::nullopt};

  std::size_t k = 1;
  auto next = [&](const Line& from) -> const Line& {
    if (k >= lines.size()) throw ParseError("unexpected end of file", from.number);
    return lines[k++];
  };

  while (k < lines.size()) {
    const Line& entry = lines[k++];
    if (entry.tokens.size() == 1 && entry.tokens[0] == "truth") {
      if (out.truth) throw ParseError("duplicate truth section", entry.number);
      Labeling truth;
      for (long long i = 0; i < n; ++i) {
        truth.push_back(need_permutation(next(entry), static_cast<int>(m)));
      }
      out.truth = std::move(truth);
      continue;
    }
    if (entry.tokens.size() != 2) {
      throw ParseError("expected 'i j' or 'truth'", entry.number);
    }
    const long long i = need_int(entry.tokens[0], entry.number, "sensor");
    const long long j = need_int(entry.tokens[1], entry.number, "sensor");
    if (i < 1 || i > n || j < 1 || j > n || i == j) {
      throw ParseError("sensor pair out of range", entry.number);
    }
    if (out.associations.contains(static_cast<int>(i - 1),
                                  static_cast<int>(j - 1))) {
      throw ParseError("duplicate association", entry.number);
    }
    const Line& first = next(entry);
    if (static_cast<long long>(first.tokens.size()) != m) {
      throw ParseError("expected " + std::to_string(m) + " values",
                       first.number);
    }
    Association assoc;
    if (auto p = as_permutation(first.tokens)) {
      assoc = Association::hard(*p);
    } else {
      Matrix x(m, m);
      const Line* prev = &first;
      for (long long r = 0; r < m; ++r) {
        if (r > 0 && k >= lines.size()) {
          throw ParseError("not a permutation of 1.." + std::to_string(m) +
                               ", and the file ends before " +
                               std::to_string(m) + " matrix rows",
                           prev->number);
        }
        const Line& row = r == 0 ? first : next(entry);
        prev = &row;
        if (static_cast<long long>(row.tokens.size()) != m) {
          throw ParseError("expected " + std::to_string(m) + " values",
                           row.number);
        }
        for (long long c = 0; c < m; ++c) {
          const auto v = to_double(row.tokens[c]);
          if (!v) throw ParseError("expected a real number", row.number);
          x(r, c) = *v;
        }
      }
      assoc = Association::soft(std::move(x));
    }
    try {
      out.associations.set(static_cast<int>(i - 1), static_cast<int>(j - 1),
                           std::move(assoc));
    } catch (const Error& e) {
      throw ParseError(e.what(), entry.number);
    }
  }
  return out;
}

void write_instance(std::ostream& out, const PairwiseAssociations& a,
                    const Labeling* truth) {
  out << a.sensors() << ' ' << a.targets() << '\n';
  for (const auto& [key, assoc] : a.entries()) {
    out << key.first + 1 << ' ' << key.second + 1 << '\n';
    if (assoc.perm) {
      out << format_permutation(*assoc.perm) << '\n';
      continue;
    }
    for (Eigen::Index r = 0; r < assoc.matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < assoc.matrix.cols(); ++c) {
        out << (c ? " " : "") << format_double(assoc.matrix(r, c));
      }
      out << '\n';
    }
  }
  if (truth) {
    out << "truth\n";
    write_labels(out, *truth);
  }
}

SensorGraph graph_from_associations(const PairwiseAssociations& a) {
  SensorGraph g(a.sensors());
  for (const auto& entry : a.entries()) {
    g.add_edge(entry.first.second, entry.first.first);
  }
  return g;
}

void write_labels(std::ostream& out, const Labeling& labels) {
  for (const Permutation& p : labels) out << format_permutation(p) << '\n';
}

Labeling read_labels(std::istream& in) {
  Labeling out;
  int m = -1;
  for (const Line& line : tokenize(in)) {
    if (m < 0) m = static_cast<int>(line.tokens.size());
    out.push_back(need_permutation(line, m));
  }
  return out;
}

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string section;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (const auto hash = text.find('#'); hash != std::string::npos) {
      text.erase(hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ParseError("malformed section header", number);
      }
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key = value", number);
    }
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", number);
    auto& entries = cfg.sections_[section];
    if (entries.contains(key)) throw ParseError("duplicate key " + key, number);
    entries[key] = Entry{trim(text.substr(eq + 1)), number};
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& section,
                                  const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto e = s->second.find(key);
  if (e == s->second.end()) return nullptr;
  e->second.used = true;
  return &e->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.contains(key);
}

const std::string& Config::raw(const std::string& section,
                               const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing key " + section + "." + key);
  return e->value;
}

int Config::line(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return 0;
  const auto e = s->second.find(key);
  return e == s->second.end() ? 0 : e->second.line;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const auto v = to_int(e->value);
  if (!v) throw ParseError(key + ": expected an integer", e->line);
  return *v;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  const auto v = to_double(e->value);
  if (!v) throw ParseError(key + ": expected a real number", e->line);
  return *v;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1") return true;
  if (e->value == "false" || e->value == "0") return false;
  throw ParseError(key + ": expected true or false", e->line);
}

std::vector<double> Config::get_doubles(const std::string& section,
                                        const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing key " + section + "." + key);
  std::string text = e->value;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::vector<double> out;
  for (const auto& tok : split(text)) {
    const auto v = to_double(tok);
    if (!v) throw ParseError(key + ": expected real numbers", e->line);
    out.push_back(*v);
  }
  return out;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = Entry{value, 0};
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!entry.used) out.push_back(section.empty() ? key : section + "." + key);
    }
  }
  return out;
}

std::string extract_header_config(std::istream& in) {
  std::string out;
  std::string text;
  while (std::getline(in, text)) {
    if (text.rfind("# ", 0) != 0) break;
    out += text.substr(2);
    out += '\n';
  }
  return out;
}

}  // namespace permsync
