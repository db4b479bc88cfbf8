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
#include <random>

#include "axval/axioms/graph.hpp"
#include "support/extensional.hpp"

namespace axval {
namespace {

using namespace axval::testing;
using axioms::CompGraph;
using axioms::Env;
using axioms::GraphInterpretation;

// x -> f = x + 1, g = 2x -> h = f * g
CompGraph diamond() {
  CompGraph g;
  const int x = g.add_input("x");
  const int f = g.add("f", unary([](double v) { return v + 1; }), {x});
  const int gg = g.add("g", unary([](double v) { return 2 * v; }), {x});
  const int h = g.add("h", [](const std::vector<std::any>& a) { return std::any(num(a[0]) * num(a[1])); }, {f, gg});
  g.set_output(h);
  return g;
}

TEST(CompGraph, DiamondExecuteAndPropagate) {
  const CompGraph g = diamond();
  const Env e = g.execute(3.0);
  EXPECT_EQ(num(e[1]), 4.0);
  EXPECT_EQ(num(e[2]), 6.0);
  EXPECT_EQ(num(e[3]), 24.0);
  const Env same = g.propagate({{0, 3.0}});
  for (size_t v = 0; v < e.size(); ++v) EXPECT_EQ(num(same[v]), num(e[v]));
  const Env own = g.propagate({{0, 3.0}, {1, 4.0}});
  EXPECT_EQ(num(own[3]), 24.0);
  const Env over = g.propagate({{0, 3.0}, {1, 10.0}});
  EXPECT_EQ(num(over[1]), 10.0);
  EXPECT_EQ(num(over[2]), 6.0);
  EXPECT_EQ(num(over[3]), 60.0);
  EXPECT_THROW(g.propagate({{1, 1.0}}), std::invalid_argument);
}

TEST(CompGraph, CycleAndBadEdgesRejected) {
  CompGraph g;
  const int x = g.add_input("x");
  EXPECT_THROW(g.add("bad", unary([](double v) { return v; }), {5}), std::out_of_range);
  EXPECT_THROW(g.add_input("y"), std::invalid_argument);
  const int loop = g.add("loop", unary([](double v) { return v; }), {x, 1});
  g.set_output(loop);
  EXPECT_THROW(g.topological_order(), std::exception);
  EXPECT_THROW(g.execute(1.0), std::exception);
}

TEST(CompGraph, IsomorphismChecked) {
  const CompGraph g = diamond();
  EXPECT_NO_THROW(axioms::check_isomorphism(g, g, {0, 1, 2, 3}));
  EXPECT_THROW(axioms::check_isomorphism(g, g, {0, 2, 1, 3}), std::invalid_argument);
  EXPECT_THROW(axioms::check_isomorphism(g, g, {0, 1, 1, 3}), std::invalid_argument);
}

TEST(Linearize, DiamondComposesToExecute) {
  const CompGraph g = diamond();
  const auto lin = axioms::linearize(g);
  EXPECT_EQ(lin.components.size(), 4u);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const double x = u(rng);
    std::any v = x;
    for (const auto& c : lin.components) v = c(v);
    EXPECT_EQ(num(v), num(g.execute(x)[3]));
  }
}

TEST(Linearize, TwoNodeChainIsOriginalDecomposition) {
  CompGraph g;
  const int x = g.add_input("x");
  const int a = g.add("a", unary([](double v) { return v * v; }), {x});
  const int b = g.add("b", unary([](double v) { return v - 1; }), {a});
  g.set_output(b);
  const auto lin = axioms::linearize(g);
  ASSERT_EQ(lin.components.size(), 3u);
  std::any v = 3.0;
  v = lin.components[0](v);
  v = lin.components[1](v);
  EXPECT_EQ(num(std::any_cast<const Env&>(v)[1]), 9.0);
  EXPECT_EQ(num(lin.components[2](v)), 8.0);
}

// Chain x -> c1 -> c2 -> c3 where the abstract c2 is wrong on some inputs.
struct Chain {
  CompGraph g;
  CompGraph h;
  GraphInterpretation gi;
};

std::unique_ptr<Chain> chain() {
  auto c = std::make_unique<Chain>();
  for (auto* graph : {&c->g, &c->h}) {
    const bool abstract = graph == &c->h;
    const int x = graph->add_input("x");
    const int a = graph->add("c1", unary([](double v) { return v + 1; }), {x});
    const int b = graph->add("c2", unary([abstract](double v) { return abstract && v > 3.0 ? 0.0 : 2 * v; }), {a});
    const int o = graph->add("c3", unary([](double v) { return v - 5; }), {b});
    graph->set_output(o);
  }
  c->gi.concrete = &c->g;
  c->gi.abstract = &c->h;
  c->gi.pi = {0, 1, 2, 3};
  c->gi.alpha.assign(4, id_fn());
  c->gi.gamma.assign(4, id_fn());
  c->gi.abstract_eq.assign(4, close_eq());
  c->gi.output_eq = close_eq();
  return c;
}

TEST(GraphAxioms, LinearChainMatchesLinearEngine) {
  const auto c = chain();
  std::vector<std::any> data;
  for (int i = 0; i < 40; ++i) data.emplace_back(0.1 * i);
  const auto graph = axioms::check_graph_axioms(c->gi, data);
  // The same decomposition written directly as a linear bundle.
  axioms::Bundle b;
  for (const auto* m : {&c->g, &c->h}) {
    auto& side = m == &c->g ? b.concrete : b.abstract;
    for (int v = 1; v <= 3; ++v) {
      side.push_back(axioms::batched([m, v](const std::any& x) { return m->vertex(v).op({x}); }));
    }
  }
  for (int i = 0; i <= 3; ++i) {
    b.alpha.push_back(axioms::batched(id_fn()));
    b.gamma.push_back(axioms::batched(id_fn()));
    b.abstract_equal.push_back(axioms::batched_eq(close_eq()));
    b.equality_mode.push_back("exact");
  }
  b.output_equal = axioms::batched_eq(close_eq());
  const auto linear = axioms::run_axioms(b, {std::any(data)});
  for (int v = 1; v <= 3; ++v) {
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(graph[static_cast<size_t>(v)][static_cast<size_t>(k)].violations,
                linear[static_cast<size_t>(v - 1)][static_cast<size_t>(k)].violations)
          << "vertex " << v << " axiom " << k + 1;
      EXPECT_EQ(graph[static_cast<size_t>(v)][static_cast<size_t>(k)].n, 40);
    }
  }
  EXPECT_GT(graph[2][0].violations, 0);
  EXPECT_EQ(graph[1][0].violations, 0);
}

TEST(GraphAxioms, ExtensionalFixtureDistinguishesAffineInterpretations) {
  const Extensional fx;
  const auto truth = axioms::check_graph_axioms(fx.base(fx.truth), fx.data);
  for (const auto& row : truth) {
    for (const auto& c : row) EXPECT_EQ(c.violations, 0);
  }
  const auto wrong = axioms::check_graph_axioms(fx.wrong_affine(), fx.data);
  EXPECT_GT(wrong[5][0].violations, 0);
  EXPECT_GT(wrong[6][0].violations, 0);
  EXPECT_EQ(wrong[3][0].violations, 0);
}

TEST(GraphAxioms, ReciprocalOperatorsMakeInterpretationsIndistinguishable) {
  const Extensional fx;
  const auto wrong = axioms::check_graph_axioms(fx.wrong_reciprocal(), fx.data);
  for (const auto& row : wrong) {
    for (const auto& c : row) EXPECT_EQ(c.violations, 0);
  }
}

TEST(GraphAxioms, LinearizedFixtureAgreesWithGraphEngine) {
  const Extensional fx;
  std::vector<std::any> batch = fx.data;
  for (const auto& [gi, expect_clean] : std::vector<std::pair<GraphInterpretation, bool>>{
           {fx.base(fx.truth), true}, {fx.wrong_reciprocal(), true}, {fx.wrong_affine(), false}}) {
    const auto graph = axioms::check_graph_axioms(gi, fx.data);
    const auto linear = axioms::run_axioms(axioms::linearized_bundle(gi), {std::any(batch)});
    int64_t graph_prefix = 0;
    for (const auto& row : graph) graph_prefix += row[0].violations;
    int64_t linear_prefix = 0;
    for (const auto& row : linear) linear_prefix += row[0].violations;
    EXPECT_EQ(graph_prefix == 0, expect_clean);
    EXPECT_EQ(linear_prefix == 0, expect_clean);
  }
}

TEST(GraphAxioms, NonIsomorphicRejected) {
  const Extensional fx;
  auto gi = fx.base(fx.truth);
  gi.pi = {0, 2, 1, 3, 4, 5, 6, 7};
  EXPECT_THROW(axioms::check_graph_axioms(gi, fx.data), std::invalid_argument);
}

TEST(GraphAxioms, ParallelEquivalenceOnSmallGraph) {
  const auto c = chain();
  std::vector<std::any> data;
  for (int i = 0; i < 10; ++i) data.emplace_back(0.5 * i);
  const auto results = axioms::check_parallel_equivalence(c->gi, data);
  EXPECT_FALSE(results.empty());
  int64_t empty_subset = 0;
  for (const auto& r : results) {
    if (r.subset == 0) empty_subset += r.counts.violations;
  }
  EXPECT_EQ(empty_subset, 0);
  const auto interleaved = axioms::execute_interleaved(c->gi, {false, false, false, false}, 2.0);
  EXPECT_EQ(num(interleaved[3]), num(c->g.execute(2.0)[3]));
}

}  // namespace
}  // namespace axval
