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

#ifndef PERMSYNC_COMMON_H_
#define PERMSYNC_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace permsync {

// Dense real matrix, row-major. Every relaxed label, association and
// structural graph matrix in the library uses this type.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Error hierarchy. Everything derives from Error so callers can catch once.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands of incompatible size.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input outside the domain of an operation (NaN, non-permutation, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid protocol or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A random generator exhausted its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Cholesky or SVD hit a (numerically) singular matrix.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// The only random engine used by the library. Its output sequence is fixed by
// the standard, unlike the std distributions, so every draw below goes through
// uniform_index / uniform_real.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound) by rejection sampling. bound >= 1.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - Rng::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_real(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Counter-based seed splitter (splitmix64 finalizer): stream k of a master
// seed is reproducible without generating streams 0..k-1.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace permsync

#endif  // PERMSYNC_COMMON_H_
