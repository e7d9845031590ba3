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

#ifndef PERMSYNC_ASSIGN_H_
#define PERMSYNC_ASSIGN_H_

#include "permsync/common.h"
#include "permsync/perm.h"

namespace permsync {

// Maximum-profit linear assignment (Hungarian method, O(m^3)).
//
// Returns the permutation pi maximizing sum_l profit(pi(l), l), which equals
// <profit, matrix_of(pi)>. Among optimal permutations the one with the
// lexicographically smallest image sequence is returned; profits within a
// relative 1e-12 of each other count as tied. Throws DomainError on
// non-finite entries and DimensionError on non-square input.
Permutation solve_assignment(const Matrix& profit);

// sum_l profit(pi(l), l), accumulated in ascending l.
double assignment_objective(const Matrix& profit, const Permutation& pi);

}  // namespace permsync

#endif  // PERMSYNC_ASSIGN_H_
