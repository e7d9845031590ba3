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


// Small generators shared by the unit tests.

#ifndef PERMSYNC_TESTS_TEST_SUPPORT_H_
#define PERMSYNC_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cstdint>

#include "permsync/assoc.h"
#include "permsync/common.h"
#include "permsync/graph.h"
#include "permsync/perm.h"

namespace permsync::testing {

inline int draw(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, hi - lo + 1));
}

inline Matrix random_matrix(Rng& rng, int rows, int cols, double lo = -1.0,
                            double hi = 1.0) {
  Matrix x(rows, cols);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x.data()[k] = lo + (hi - lo) * uniform_real(rng);
  }
  return x;
}

inline Matrix random_symmetric(Rng& rng, int n) {
  const Matrix x = random_matrix(rng, n, n);
  return x + x.transpose();
}

inline Matrix random_orthogonal(Rng& rng, int m) {
  // Gram-Schmidt on a random matrix; adequate for well-conditioned draws.
  Matrix q = random_matrix(rng, m, m);
  for (int c = 0; c < m; ++c) {
    for (int p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
    q.col(c).normalize();
  }
  return q;
}

inline SensorGraph complete_graph(int n) {
  SensorGraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) g.add_edge(i, j);
    }
  }
  return g;
}

inline SensorGraph path_graph(int n) {
  SensorGraph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

inline double max_abs(const Matrix& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

}  // namespace permsync::testing

#endif  // PERMSYNC_TESTS_TEST_SUPPORT_H_
