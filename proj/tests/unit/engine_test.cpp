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

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "axval/axioms/audit.hpp"
#include "axval/axioms/engine.hpp"
#include "axval/io/container.hpp"

namespace axval {
namespace {

using axioms::Axiom;

axioms::AxiomReport report_of(const axioms::Bundle& b, int64_t n) {
  return axioms::make_report(b, axioms::run_axioms(b, axioms::id_batches(n)));
}

TEST(Engine, IdentityBundleHasNoViolations) {
  for (int l = 1; l <= 5; ++l) {
    const auto r = report_of(axioms::identity_bundle(l), 2000);
    ASSERT_EQ(r.entries.size(), static_cast<size_t>(4 * l));
    for (const auto& e : r.entries) {
      EXPECT_EQ(e.violations, 0);
      EXPECT_EQ(e.n, 2000);
    }
  }
}

TEST(Engine, FirstComponentPrefixAndComponentCountsAgree) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = report_of(axioms::independent_error_bundle(3, 0.1, seed), 3000);
    EXPECT_EQ(r.at(Axiom::kPrefixEquivalence, 1).violations, r.at(Axiom::kComponentEquivalence, 1).violations);
    EXPECT_EQ(r.at(Axiom::kPrefixReplaceability, 1).violations, r.at(Axiom::kComponentReplaceability, 1).violations);
    EXPECT_GT(r.at(Axiom::kPrefixEquivalence, 1).violations, 0);
  }
}

TEST(Engine, IndependentErrorsCompound) {
  const double eps0 = 0.05;
  const auto r = report_of(axioms::independent_error_bundle(4, eps0, 3), 20000);
  for (int i = 1; i <= 4; ++i) {
    EXPECT_NEAR(r.at(Axiom::kPrefixEquivalence, i).epsilon_hat, 1.0 - std::pow(1.0 - eps0, i), 0.01) << i;
    EXPECT_NEAR(r.at(Axiom::kComponentEquivalence, i).epsilon_hat, eps0, 0.01) << i;
    EXPECT_EQ(r.at(Axiom::kPrefixEquivalence, i).violations, r.at(Axiom::kPrefixReplaceability, i).violations);
  }
}

TEST(Engine, BoundaryTypeMismatchNamesAxiomAndComponent) {
  auto b = axioms::identity_bundle(2);
  b.gamma[2] = [](const std::any&) { return std::any(std::string("wrong")); };
  try {
    axioms::run_axioms(b, axioms::id_batches(10));
    FAIL() << "expected AxiomError";
  } catch (const axioms::AxiomError& e) {
    EXPECT_EQ(e.component(), 2);
    EXPECT_EQ(e.axiom(), Axiom::kPrefixReplaceability);
    EXPECT_NE(std::string(e.what()).find("prefix-replaceability at component 2"), std::string::npos);
  }
}

TEST(Engine, MalformedBundleRejected) {
  auto b = axioms::identity_bundle(2);
  b.alpha.pop_back();
  EXPECT_THROW(axioms::run_axioms(b, axioms::id_batches(1)), std::invalid_argument);
  EXPECT_THROW(axioms::check_axiom(Axiom::kPrefixEquivalence, axioms::identity_bundle(2), 3, axioms::id_batches(1)), axioms::AxiomError);
}

TEST(Engine, CheckAxiomSelectsEntry) {
  const auto b = axioms::independent_error_bundle(3, 0.2, 9);
  const auto batches = axioms::id_batches(500);
  const auto table = axioms::run_axioms(b, batches);
  const auto c = axioms::check_axiom(Axiom::kComponentEquivalence, b, 2, batches);
  EXPECT_EQ(c.violations, table[1][1].violations);
}

TEST(Engine, UpperBoundIsCalibrated) {
  int covered = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = report_of(axioms::independent_error_bundle(1, 0.01, 1000 + seed), 10000);
    covered += r.at(Axiom::kPrefixEquivalence, 1).epsilon_upper_95 > 0.01 ? 1 : 0;
  }
  EXPECT_GE(covered, 90);
}

TEST(Engine, ReportJsonMatchesGolden) {
  auto r = report_of(axioms::independent_error_bundle(3, 0.1, 5), 1000);
  r.config_hash = "golden-config";
  r.dataset_hash = "ids-0-999";
  r.seed = 5;
  const std::string text = r.to_json().dump(2) + "\n";
  const std::string path = std::string(AXVAL_SOURCE_DIR) + "/tests/golden/axiom_report.json";
  if (std::getenv("AXVAL_UPDATE_GOLDEN") != nullptr) io::write_file(path, text);
  EXPECT_EQ(text, io::read_file(path));
  const auto back = axioms::AxiomReport::from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back.to_json(), r.to_json());
}

TEST(Audit, IdentityTriviallySatisfied) {
  for (const auto& row : axioms::prefix_bound_audit(report_of(axioms::identity_bundle(3), 100))) {
    EXPECT_EQ(row.prefix_rate, 0.0);
    EXPECT_FALSE(row.exceeds);
  }
}

TEST(Audit, IndependentErrorsStayInsideEnvelope) {
  const double eps0 = 0.05;
  const auto rows = axioms::prefix_bound_audit(report_of(axioms::independent_error_bundle(4, eps0, 12), 10000));
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    EXPECT_FALSE(row.exceeds) << row.component;
    EXPECT_LE(row.prefix_rate, row.component * eps0 + row.slack);
    EXPECT_NEAR(row.prefix_rate, 1.0 - std::pow(1.0 - eps0, row.component), 0.02);
  }
}

TEST(Audit, FlagsPrefixRateAboveComponentSum) {
  auto r = report_of(axioms::identity_bundle(2), 10000);
  for (auto& e : r.entries) {
    if (e.axiom == 1 && e.component == 2) {
      e.violations = 500;
      e.epsilon_hat = 0.05;
      e.epsilon_upper_95 = 0.055;
    }
  }
  EXPECT_TRUE(axioms::prefix_bound_audit(r)[1].exceeds);
}

TEST(Audit, WorstCaseBoundSaturates) {
  for (int i = 1; i <= 10; ++i) {
    const double b = axioms::worst_case_prefix_bound(i, 0.2);
    if (i >= 5) EXPECT_EQ(b, 1.0);
    else EXPECT_NEAR(b, 0.2 * i, 1e-12);
  }
}

}  // namespace
}  // namespace axval
