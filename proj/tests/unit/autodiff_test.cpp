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

#include "axval/nn/gemm.hpp"
#include "axval/nn/graph.hpp"
#include "support/gradcheck.hpp"

namespace axval {
namespace {

using nn::Graph;
using nn::Tensor64;

TEST(Autodiff, EveryPrimitiveMatchesCentralDifferences) {
  std::mt19937_64 rng(11);
  for (const auto& [name, make] : testing::primitive_cases()) {
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) worst = std::max(worst, testing::gradient_error(make(rng)));
    EXPECT_LT(worst, 1e-4) << name;
  }
}

TEST(Autodiff, GradientAccumulatesOverReuse) {
  Graph<double> g;
  auto x = g.leaf(Tensor64({2}, {1.5, -2.0}), true);
  auto y = g.sum(g.add(g.mul(x, x), x));
  g.backward(y);
  const auto gx = g.grad(x);
  EXPECT_DOUBLE_EQ(gx[0], 4.0);
  EXPECT_DOUBLE_EQ(gx[1], -3.0);
}

TEST(Autodiff, MaskedSoftmaxZeroesDisallowedEntries) {
  Graph<double> g(false);
  auto a = g.constant(Tensor64({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9}));
  auto mask = std::make_shared<const nn::AttentionMask>(nn::AttentionMask::causal(3));
  const auto& p = g.value(g.softmax(a, mask));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 0.0);
  EXPECT_NEAR(p[3] + p[4], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(p[5], 0.0);
}

TEST(Autodiff, ShapeMismatchNamesBothShapes) {
  Graph<double> g;
  auto a = g.constant(Tensor64({2, 3}));
  auto b = g.constant(Tensor64({4, 5}));
  try {
    g.matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const nn::ShapeError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("[2, 3]"), std::string::npos) << m;
    EXPECT_NE(m.find("[4, 5]"), std::string::npos) << m;
  }
}

TEST(Autodiff, NonFiniteResultRaises) {
  Graph<double> g;
  auto a = g.constant(Tensor64({1}, {1e308}));
  EXPECT_THROW(g.scale(a, 1e10), nn::NumericalError);
}

TEST(Gemm, AgreesWithNaiveProductForAllTransposes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int64_t m = testing::rand_dim(rng, 1, 37), n = testing::rand_dim(rng, 1, 37), k = testing::rand_dim(rng, 1, 37);
    const bool ta = trial & 1, tb = trial & 2;
    const Tensor64 a = testing::random_tensor(rng, ta ? nn::Shape{k, m} : nn::Shape{m, k});
    const Tensor64 b = testing::random_tensor(rng, tb ? nn::Shape{n, k} : nn::Shape{k, n});
    Tensor64 c = testing::random_tensor(rng, {m, n});
    Tensor64 expect = c;
    for (int64_t i = 0; i < m; ++i) {
      for (int64_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (int64_t p = 0; p < k; ++p) s += (ta ? a.at(p, i) : a.at(i, p)) * (tb ? b.at(j, p) : b.at(p, j));
        expect.at(i, j) = 0.5 * s + 2.0 * expect.at(i, j);
      }
    }
    nn::gemm<double>(ta, tb, m, n, k, 0.5, a.ptr(), b.ptr(), 2.0, c.ptr());
    for (int64_t i = 0; i < c.numel(); ++i) ASSERT_NEAR(c[i], expect[i], 1e-12);
  }
}

}  // namespace
}  // namespace axval
