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

#include "axval/abstract/twosat.hpp"

#include <bit>
#include <random>

#include "axval/sat/dataset.hpp"

namespace axval::abstract {

ClauseList parse_clauses(std::span<const int32_t> tokens) {
  const sat::Formula f = sat::detokenize(tokens);
  return ClauseList(f.begin(), f.end());
}

Activations evaluate_satisfiability(const ClauseList& clauses, const std::vector<NeuronInterpretation>& interps) {
  if (interps.empty()) throw std::invalid_argument("evaluate_satisfiability: empty interpretation set");
  const sat::FeatureProfile profile = sat::brute_force_profile(clauses);
  Activations out(interps.size());
  for (size_t j = 0; j < interps.size(); ++j) out[j] = interps[j].expr.eval(profile);
  return out;
}

bool predict_satisfiability(const Activations& acts) {
  for (const bool a : acts) {
    if (a) return true;
  }
  return false;
}

bool clauses_equal(const ClauseList& a, const ClauseList& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].same_unordered(b[i])) return false;
  }
  return true;
}

bool clauses_equal_ordered(const ClauseList& a, const ClauseList& b) { return a == b; }

namespace {

// Sweeps every assignment to the atoms in `used`, 64 per word. `g` is the OR
// of the interpretations; returns the first compressed vector where
// g differs from "some atom is set", or nothing.
std::optional<uint32_t> sweep(const std::vector<NeuronInterpretation>& interps, const std::vector<int>& used,
                              uint64_t& checked) {
  const int m = static_cast<int>(used.size());
  const int low = std::min(m, 6);
  const uint64_t words = m > 6 ? (uint64_t{1} << (m - 6)) : 1;
  const uint64_t valid = low == 6 ? ~uint64_t{0} : ((uint64_t{1} << (1u << low)) - 1);
  static constexpr uint64_t kPattern[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                           0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  uint64_t atoms[sat::kAssignments] = {};
  for (int i = 0; i < low; ++i) atoms[used[static_cast<size_t>(i)]] = kPattern[i];
  for (uint64_t w = 0; w < words; ++w) {
    for (int i = 6; i < m; ++i) atoms[used[static_cast<size_t>(i)]] = ((w >> (i - 6)) & 1) ? ~uint64_t{0} : 0;
    uint64_t g = 0;
    for (const auto& n : interps) g |= n.expr.eval_words(atoms);
    // Target: any atom set. Only the all-zero vector (w == 0, bit 0) is false.
    uint64_t target = ~uint64_t{0};
    if (w == 0) target &= ~uint64_t{1};
    const uint64_t diff = (g ^ target) & valid;
    checked += static_cast<uint64_t>(std::popcount(valid));
    if (diff != 0) return static_cast<uint32_t>((w << 6) | static_cast<uint64_t>(std::countr_zero(diff)));
  }
  return std::nullopt;
}

uint32_t expand(uint32_t compressed, const std::vector<int>& used) {
  uint32_t mask = 0;
  for (size_t i = 0; i < used.size(); ++i) {
    if ((compressed >> i) & 1u) mask |= 1u << used[i];
  }
  return mask;
}

}  // namespace

CompletenessResult completeness_check(const std::vector<NeuronInterpretation>& interps, int64_t realizable_samples,
                                      uint64_t seed) {
  CompletenessResult r;
  uint32_t used_mask = 0;
  bool disj_only = true;
  for (const auto& n : interps) {
    used_mask |= n.expr.atoms_used();
    disj_only = disj_only && n.expr.disjunction_only();
  }
  const bool all_used = used_mask == 0xFFFFFFFFu;
  std::vector<int> used;
  for (int a = 0; a < sat::kAssignments; ++a) {
    if ((used_mask >> a) & 1u) used.push_back(a);
  }
  if (disj_only) {
    // OR of atom disjunctions equals the OR of all atoms iff every atom is covered.
    r.method = "coverage";
    r.vectors_checked = sat::kAssignments;
    r.complete = all_used;
    if (!all_used) r.counterexample = 1u << std::countr_zero(~used_mask);
  } else {
    // Completeness requires every atom to be used.
    r.method = "sweep";
    const auto found = sweep(interps, used, r.vectors_checked);
    if (found) {
      r.counterexample = expand(*found, used);
    } else if (!all_used) {
      const uint32_t missing = 1u << std::countr_zero(~used_mask);
      uint64_t zero[sat::kAssignments] = {};
      bool g0 = false;
      for (const auto& n : interps) g0 = g0 || (n.expr.eval_words(zero) & 1u);
      r.counterexample = g0 ? 0u : missing;
    }
    r.complete = !r.counterexample.has_value();
  }
  if (realizable_samples > 0) {
    std::mt19937_64 rng(seed);
    for (int64_t i = 0; i < realizable_samples; ++i) {
      const auto f = sat::random_formula(rng);
      const auto profile = sat::brute_force_profile(f);
      bool g = false;
      for (const auto& n : interps) g = g || n.expr.eval(profile);
      r.sampled_disagreements += g != (profile != 0);
    }
    r.sampled = realizable_samples;
  }
  return r;
}

}  // namespace axval::abstract
