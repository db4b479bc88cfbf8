// Copyright 2026 The axval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "axval/axioms/engine.hpp"

namespace axval::axioms {

// Measured prefix-equivalence rate at component i against bounds built from
// the componentwise rates of components 1..i.
struct PrefixBoundRow {
  int component = 0;
  double prefix_rate = 0.0;
  double component_rate = 0.0;
  double sum_bound = 0.0;         // sum of componentwise rates, capped at 1
  double worst_case_bound = 0.0;  // i * max componentwise rate, capped at 1
  double independent = 0.0;       // 1 - prod(1 - componentwise rate)
  double slack = 0.0;             // 3 * (prefix CI width + sum of componentwise CI widths)
  bool exceeds = false;           // prefix_rate > sum_bound + slack
};

std::vector<PrefixBoundRow> prefix_bound_audit(const AxiomReport& report);

// Worst-case guarantee i * eps0 on the prefix failure rate, capped at 1.
double worst_case_prefix_bound(int i, double eps0);

// Synthetic bundles over batches of sample ids (std::vector<int64_t>).
// Identity: every component is the same deterministic map on both sides and
// all alpha/gamma are identities.
Bundle identity_bundle(int length);

// Abstract component j flips a sticky error flag on sample s with
// probability eps0, decided by a hash of (seed, s, j). Concrete components
// never err and gamma carries the flag into the concrete side, so prefix
// failures at i follow 1 - (1 - eps0)^i.
Bundle independent_error_bundle(int length, double eps0, uint64_t seed);

std::vector<std::any> id_batches(int64_t n, int64_t batch_size = 1024);

}  // namespace axval::axioms
