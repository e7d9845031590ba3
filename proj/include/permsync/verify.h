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


// Property batteries behind `permsync verify`. Each check runs over a batch
// of seeded random instances and reports the worst deviation it saw.

#ifndef PERMSYNC_VERIFY_H_
#define PERMSYNC_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

namespace permsync {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// "lemmas", "theorems", "equivalence", "assignment".
const std::vector<std::string>& verify_suites();

// Throws ConfigError for an unknown suite.
std::vector<CheckResult> run_verify(const std::string& suite,
                                    std::uint64_t seed, int instances);

}  // namespace permsync

#endif  // PERMSYNC_VERIFY_H_
