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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "axval/sat/dataset.hpp"
#include "axval/sat/formula.hpp"

namespace axval {
namespace {

using sat::Clause;
using sat::Formula;
using sat::Literal;

Formula formula_of(std::initializer_list<std::pair<int, int>> tokens) {
  Formula f{};
  size_t i = 0;
  for (const auto& [l, r] : tokens) f[i++] = Clause{Literal::from_token(l), Literal::from_token(r)};
  for (; i < f.size(); ++i) f[i] = f[0];
  return f;
}

TEST(Formula, TokenizeRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const Formula f = sat::random_formula(rng);
    const auto tokens = sat::tokenize(f);
    ASSERT_EQ(tokens.size(), static_cast<size_t>(sat::kContext));
    EXPECT_EQ(tokens[0], sat::kOpen);
    EXPECT_EQ(tokens[3], sat::kClose);
    EXPECT_EQ(tokens.back(), sat::kColon);
    EXPECT_EQ(sat::detokenize(tokens), f);
    EXPECT_EQ(sat::parse_formula(sat::to_string(f)), f);
  }
}

TEST(Formula, ParseErrorsCarryPosition) {
  EXPECT_THROW(sat::parse_formula("(x0x1)"), sat::ParseError);
  EXPECT_THROW(sat::parse_formula("(x0x9)(x0x1)(x0x1)(x0x1)(x0x1)(x0x1)(x0x1)(x0x1)(x0x1)(x0x1):"), sat::ParseError);
  auto tokens = sat::tokenize(formula_of({{0, 1}}));
  tokens[4] = sat::kColon;
  try {
    sat::detokenize(tokens);
    FAIL();
  } catch (const sat::ParseError& e) {
    EXPECT_EQ(e.position(), 4);
  }
}

TEST(Formula, AssignmentPatterns) {
  EXPECT_EQ(sat::assignment_from_pattern("TFFFF"), 1u);
  EXPECT_EQ(sat::assignment_from_pattern("FFFFT"), 16u);
  EXPECT_EQ(sat::pattern_of(31), "TTTTT");
  for (uint32_t a = 0; a < 32; ++a) EXPECT_EQ(sat::assignment_from_pattern(sat::pattern_of(a)), a);
}

TEST(Solver, HandBuiltFormulas) {
  // x0 and not x0 forced: UNSAT.
  const Formula unsat = formula_of({{0, 0}, {5, 5}});
  EXPECT_FALSE(sat::scc_sat(unsat));
  EXPECT_EQ(sat::brute_force_profile(unsat), 0u);
  // A single clause repeated: satisfied by 24 assignments.
  const Formula one = formula_of({{0, 1}});
  EXPECT_TRUE(sat::scc_sat(one));
  EXPECT_EQ(__builtin_popcount(sat::brute_force_profile(one)), 24);
  // Tautologies constrain nothing.
  EXPECT_EQ(sat::brute_force_profile(formula_of({{2, 7}})), 0xffffffffu);
}

TEST(Solver, AgreesWithBruteForce) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20000; ++t) {
    const Formula f = sat::random_formula(rng);
    ASSERT_EQ(sat::scc_sat(f), sat::brute_force_profile(f) != 0) << sat::to_string(f);
  }
}

TEST(Dataset, BalancedDeduplicatedAndSeeded) {
  const auto a = sat::generate_dataset(300, 9);
  const auto b = sat::generate_dataset(300, 9);
  ASSERT_EQ(a.samples.size(), 600u);
  std::set<std::string> seen;
  int sat_count = 0;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(sat::to_string(a.samples[i].formula), sat::to_string(b.samples[i].formula));
    EXPECT_TRUE(seen.insert(sat::to_string(a.samples[i].formula)).second);
    EXPECT_EQ(a.samples[i].sat, sat::scc_sat(a.samples[i].formula));
    sat_count += a.samples[i].sat;
  }
  EXPECT_EQ(sat_count, 300);
  EXPECT_GT(a.stats.attempts, 600);
}

TEST(Dataset, SplitIsLabelBalanced) {
  const auto ds = sat::generate_dataset(100, 4);
  const auto split = sat::balanced_split(ds.samples, 0.6, 4);
  ASSERT_EQ(split.train.size(), 120u);
  ASSERT_EQ(split.test.size(), 80u);
  int sat_train = 0;
  for (const auto& s : split.train) sat_train += s.sat;
  EXPECT_EQ(sat_train, 60);
}

TEST(Dataset, TextRoundTrip) {
  const auto ds = sat::generate_dataset(20, 1);
  EXPECT_EQ(sat::dataset_text(sat::parse_dataset_text(sat::dataset_text(ds.samples))), sat::dataset_text(ds.samples));
}

}  // namespace
}  // namespace axval
