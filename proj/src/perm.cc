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

#include "permsync/perm.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

namespace permsync {

Permutation::Permutation(int m) : map_(m) {
  if (m < 1) throw DomainError("permutation size must be positive");
  std::iota(map_.begin(), map_.end(), 0);
}

Permutation::Permutation(std::vector<int> images) : map_(std::move(images)) {
  if (map_.empty()) throw DomainError("permutation size must be positive");
  std::vector<bool> seen(map_.size(), false);
  for (int v : map_) {
    if (v < 0 || v >= size() || seen[v]) {
      throw DomainError("not a bijection of {0.." + std::to_string(size() - 1) +
                        "}");
    }
    seen[v] = true;
  }
}

bool Permutation::is_identity() const {
  for (int l = 0; l < size(); ++l) {
    if (map_[l] != l) return false;
  }
  return true;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) {
    throw DimensionError("compose: permutation sizes differ");
  }
  std::vector<int> out(p.size());
  for (int l = 0; l < p.size(); ++l) out[l] = p(q(l));
  return Permutation(std::move(out));
}

Permutation inverse(const Permutation& p) {
  std::vector<int> out(p.size());
  for (int l = 0; l < p.size(); ++l) out[p(l)] = l;
  return Permutation(std::move(out));
}

Matrix matrix_of(const Permutation& p) {
  Matrix m = Matrix::Zero(p.size(), p.size());
  for (int j = 0; j < p.size(); ++j) m(p(j), j) = 1.0;
  return m;
}

std::optional<Permutation> permutation_of(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return std::nullopt;
  const int n = static_cast<int>(m.rows());
  std::vector<int> images(n, -1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = m(i, j);
      if (v == 1.0) {
        if (images[j] != -1) return std::nullopt;
        images[j] = i;
      } else if (v != 0.0) {
        return std::nullopt;
      }
    }
    if (images[j] == -1) return std::nullopt;
  }
  try {
    return Permutation(std::move(images));
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

int perm_distance(const Permutation& p1, const Permutation& p2) {
  if (p1.size() != p2.size()) {
    throw DimensionError("perm_distance: permutation sizes differ");
  }
  // <P1, P2> counts the columns where both matrices put their 1 in the same
  // row, so the trace formula reduces to a mismatch count.
  int agree = 0;
  for (int l = 0; l < p1.size(); ++l) agree += p1(l) == p2(l);
  return p1.size() - agree;
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("frobenius_inner: shapes differ");
  }
  return a.cwiseProduct(b).sum();
}

bool is_row_stochastic(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite() || m.minCoeff() < -tol) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).sum() - 1.0) > tol) return false;
  }
  return true;
}

bool is_doubly_stochastic(const Matrix& m, double tol) {
  if (!is_row_stochastic(m, tol)) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (std::abs(m.col(j).sum() - 1.0) > tol) return false;
  }
  return true;
}

void check_square_finite(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + ": non-finite entry");
  }
}

Permutation random_permutation(Rng& rng, int m) {
  std::vector<int> images(m);
  std::iota(images.begin(), images.end(), 0);
  for (int i = m - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform_index(rng, i + 1));
    std::swap(images[i], images[j]);
  }
  return Permutation(std::move(images));
}

std::string format_permutation(const Permutation& p) {
  std::string out;
  for (int l = 0; l < p.size(); ++l) {
    if (l) out += ' ';
    out += std::to_string(p(l) + 1);
  }
  return out;
}

Permutation parse_permutation(std::string_view line) {
  std::vector<int> images;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
    if (ec != std::errc() || ptr != line.data() + end) {
      throw DomainError("bad permutation token '" +
                        std::string(line.substr(pos, end - pos)) + "'");
    }
    images.push_back(v - 1);
    pos = end;
  }
  return Permutation(std::move(images));
}

}  // namespace permsync
