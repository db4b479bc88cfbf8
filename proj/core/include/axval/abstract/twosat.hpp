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
#include <optional>
#include <span>
#include <vector>

#include "axval/abstract/expr.hpp"
#include "axval/sat/formula.hpp"

namespace axval::abstract {

using ClauseList = std::vector<sat::Clause>;
using Activations = std::vector<bool>;

// d_h[1]: clause i = (tokens[4i+1], tokens[4i+2]).
ClauseList parse_clauses(std::span<const int32_t> tokens);
// d_h[2]: output[j] = interps[j] on the profile of the conjunction of clauses.
Activations evaluate_satisfiability(const ClauseList& clauses, const std::vector<NeuronInterpretation>& interps);
// d_h[3]
bool predict_satisfiability(const Activations& acts);

// Order-insensitive within clauses, order-sensitive across the list.
bool clauses_equal(const ClauseList& a, const ClauseList& b);
bool clauses_equal_ordered(const ClauseList& a, const ClauseList& b);

struct CompletenessResult {
  bool complete = false;
  // Atom vector (bit a = phi[a]) on which the OR of interps differs from the OR of all atoms.
  std::optional<uint32_t> counterexample;
  std::string method;  // coverage | sweep
  uint64_t vectors_checked = 0;
  // Realizability-restricted check over sampled formulas.
  int64_t sampled = 0;
  int64_t sampled_disagreements = 0;
};

CompletenessResult completeness_check(const std::vector<NeuronInterpretation>& interps, int64_t realizable_samples = 0,
                                      uint64_t seed = 0);

}  // namespace axval::abstract
