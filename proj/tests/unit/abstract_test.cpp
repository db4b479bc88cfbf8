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

#include "axval/abstract/expr.hpp"
#include "axval/abstract/modadd.hpp"
#include "axval/abstract/twosat.hpp"
#include "axval/sat/dataset.hpp"

namespace axval {
namespace {

using abstract::Expr;

const std::string kFixtures = std::string(AXVAL_SOURCE_DIR) + "/fixtures/";

TEST(Expr, ParsePrintRoundTrip) {
  for (const std::string s : {"phi[TFFFF]", "true", "false", "!phi[FFFFF]", "(phi[TTFFF] & !phi[FTFTF])",
                              "((phi[FTTFF] & !phi[FFFFT]) & !phi[TTTTT])", "(phi[FFFFF] | phi[FTFFF])"}) {
    EXPECT_EQ(abstract::parse_expr(s).str(), s);
  }
  EXPECT_THROW(abstract::parse_expr("phi[TFF]"), abstract::ExprParseError);
  EXPECT_THROW(abstract::parse_expr("(phi[TFFFF] & )"), abstract::ExprParseError);
}

TEST(Expr, WordEvaluationMatchesScalar) {
  std::mt19937_64 rng(2);
  const auto e = abstract::parse_expr("((phi[TTFTF] & !phi[FTFFF]) | ((phi[TTFTF] & phi[FTFFF]) & phi[TFFTF]))");
  for (int t = 0; t < 50; ++t) {
    uint64_t atoms[32];
    for (auto& w : atoms) w = rng();
    const uint64_t word = e.eval_words(atoms);
    for (int j = 0; j < 64; ++j) {
      uint32_t profile = 0;
      for (int a = 0; a < 32; ++a) profile |= static_cast<uint32_t>((atoms[a] >> j) & 1u) << a;
      ASSERT_EQ(((word >> j) & 1u) != 0, e.eval(profile));
    }
  }
}

TEST(Interpretations, FixturesRoundTrip) {
  for (const std::string name : {"table_dtree.interp", "table_disjunction_only.interp"}) {
    const auto interps = abstract::read_interpretations(kFixtures + name, "fixture");
    EXPECT_GT(interps.size(), 30u);
    const auto again = abstract::parse_interpretations(abstract::format_interpretations(interps), "fixture");
    ASSERT_EQ(again.size(), interps.size());
    for (size_t i = 0; i < interps.size(); ++i) {
      EXPECT_EQ(again[i].neuron, interps[i].neuron);
      EXPECT_EQ(again[i].expr, interps[i].expr);
    }
  }
  const auto table = abstract::read_interpretations(kFixtures + "table_dtree.interp", "fixture");
  EXPECT_EQ(table[1].neuron, 29);
  EXPECT_EQ(table[1].expr.str(), "((phi[FTTFF] & !phi[FFFFT]) & !phi[TTTTT])");
}

TEST(Interpretations, DuplicateNeuronRejected) {
  EXPECT_THROW(abstract::parse_interpretations("3 phi[TFFFF]\n3 phi[FFFFF]\n", "x"), std::exception);
}

TEST(TwoSatAbstract, IdealModelEqualsSolver) {
  const auto ideal = abstract::ideal_interpretations();
  ASSERT_EQ(ideal.size(), 32u);
  const auto ds = sat::generate_dataset(5000, 21);
  for (const auto& s : ds.samples) {
    const auto clauses = abstract::parse_clauses(sat::tokenize(s.formula));
    ASSERT_EQ(abstract::predict_satisfiability(abstract::evaluate_satisfiability(clauses, ideal)), sat::scc_sat(s.formula));
  }
}

TEST(TwoSatAbstract, ClauseEqualityModes) {
  using sat::Clause;
  using sat::Literal;
  abstract::ClauseList a{Clause{Literal::from_token(0), Literal::from_token(6)}};
  abstract::ClauseList b{Clause{Literal::from_token(6), Literal::from_token(0)}};
  EXPECT_TRUE(abstract::clauses_equal(a, b));
  EXPECT_FALSE(abstract::clauses_equal_ordered(a, b));
  EXPECT_TRUE(abstract::clauses_equal_ordered(a, a));
}

TEST(TwoSatAbstract, Completeness) {
  EXPECT_TRUE(abstract::completeness_check(abstract::ideal_interpretations()).complete);
  auto partial = abstract::ideal_interpretations();
  partial.pop_back();
  const auto r = abstract::completeness_check(partial);
  EXPECT_FALSE(r.complete);
  ASSERT_TRUE(r.counterexample.has_value());
  EXPECT_EQ(*r.counterexample, 1u << 31);
  const auto fixture = abstract::read_interpretations(kFixtures + "table_disjunction_only.interp", "fixture");
  EXPECT_TRUE(abstract::completeness_check(fixture).complete);
}

TEST(ModAddAbstract, ExhaustiveSweep) {
  for (int a = 0; a < abstract::kModulus; ++a) {
    for (int b = 0; b < abstract::kModulus; ++b) ASSERT_EQ(abstract::modular_addition(a, b), (a + b) % abstract::kModulus);
  }
}

TEST(ModAddAbstract, RoundingAndTies) {
  EXPECT_EQ(abstract::round_to(0.0005, 3), 0.001);
  EXPECT_EQ(abstract::round_to(-0.0005, 3), -0.001);
  EXPECT_EQ(abstract::round_to(0.12345, -1), 0.12345);
  abstract::ModAddSpec spec;
  spec.freqs = {};
  const auto r = abstract::difference_of_angles_argmax({{}, {}}, spec);
  EXPECT_TRUE(r.tie);
  EXPECT_EQ(r.c, 0);
}

TEST(ModAddAbstract, AngleSumEquivalence) {
  const auto enc = abstract::encoding_of_inputs(3, 4);
  const auto s1 = abstract::sum_of_angles(enc);
  const auto s2 = abstract::sum_of_angles(abstract::encoding_of_inputs(4, 3));
  EXPECT_TRUE(s1.equivalent(s2));
  auto eq = std::make_shared<const abstract::CosSinEquivalence>(abstract::downstream_equivalence(
      [](const abstract::CosSin& v) { return abstract::difference_of_angles_argmax(v).c; },
      [](const abstract::CosSin& v) { return abstract::difference_of_angles_argmax(v).c; }));
  const auto t1 = abstract::sum_of_angles(abstract::encoding_of_inputs(1, 6), eq);
  const auto t2 = abstract::sum_of_angles(abstract::encoding_of_inputs(2, 5), eq);
  const auto t3 = abstract::sum_of_angles(abstract::encoding_of_inputs(2, 6), eq);
  EXPECT_TRUE(t1.equivalent(t2));
  EXPECT_FALSE(t1.equivalent(t3));
}

}  // namespace
}  // namespace axval
