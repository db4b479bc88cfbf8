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

#include <any>
#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "axval/axioms/graph.hpp"
#include "axval/interp/operators.hpp"

namespace axval::testing {

using axioms::CompGraph;
using axioms::GraphInterpretation;

inline double num(const std::any& v) { return std::any_cast<double>(v); }

inline axioms::Op unary(std::function<double(double)> f) {
  return [f = std::move(f)](const std::vector<std::any>& a) { return std::any(f(num(a.at(0)))); };
}

inline axioms::ValueFn id_fn() {
  return [](const std::any& v) { return v; };
}

inline axioms::ValueEq close_eq() {
  return [](const std::any& a, const std::any& b) {
    if (a.type() == typeid(bool)) return std::any_cast<bool>(a) == std::any_cast<bool>(b);
    return std::abs(num(a) - num(b)) <= 1e-9 * std::max(1.0, std::abs(num(a)));
  };
}

inline std::vector<std::any> positive_points(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 4.0);
  std::vector<std::any> out;
  for (int i = 0; i < n; ++i) out.emplace_back(std::pair<double, double>{u(rng), u(rng)});
  return out;
}

// Vertices: in (x0, x1), 1 = x0, 2 = x1, 3 = copy x0, 4 = copy x1,
// 5 = 1/x0 or x0, 6 = 1/x1 or x1, 7 = comparison.
inline CompGraph reciprocal_model(bool reciprocal) {
  CompGraph g;
  const int in = g.add_input("in");
  auto pick = [](int k) {
    return [k](const std::vector<std::any>& a) {
      const auto& p = std::any_cast<const std::pair<double, double>&>(a.at(0));
      return std::any(k == 0 ? p.first : p.second);
    };
  };
  const int x0 = g.add("x0", pick(0), {in});
  const int x1 = g.add("x1", pick(1), {in});
  const int c0 = g.add("copy0", unary([](double v) { return v; }), {x0});
  const int c1 = g.add("copy1", unary([](double v) { return v; }), {x1});
  auto f = [reciprocal](double v) { return reciprocal ? 1.0 / v : v; };
  const int r0 = g.add("r0", unary(f), {c0});
  const int r1 = g.add("r1", unary(f), {c1});
  const int cmp = g.add("cmp",
                        [reciprocal](const std::vector<std::any>& a) {
                          return std::any(reciprocal ? num(a[0]) < num(a[1]) : num(a[0]) > num(a[1]));
                        },
                        {r0, r1});
  g.set_output(cmp);
  return g;
}

inline interp::LinearMap affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
  nn::Tensor64 xs({static_cast<int64_t>(x.size()), 1}, x);
  nn::Tensor64 ys({static_cast<int64_t>(y.size()), 1}, y);
  return interp::fit_linear_map(xs, ys, 0.0);
}

inline axioms::ValueFn affine(const interp::LinearMap& m) {
  return [m](const std::any& v) { return std::any(m.apply(std::vector<double>{num(v)}.data())[0]); };
}

struct Extensional {
  CompGraph concrete = reciprocal_model(true);
  CompGraph truth = reciprocal_model(true);
  CompGraph wrong = reciprocal_model(false);
  std::vector<std::any> data = positive_points(50, 8);

  GraphInterpretation base(const CompGraph& abstract) const {
    GraphInterpretation gi;
    gi.concrete = &concrete;
    gi.abstract = &abstract;
    gi.pi = {0, 1, 2, 3, 4, 5, 6, 7};
    gi.alpha.assign(8, id_fn());
    gi.gamma.assign(8, id_fn());
    gi.abstract_eq.assign(8, close_eq());
    gi.abstract_eq[0] = [](const std::any& a, const std::any& b) {
      return std::any_cast<const std::pair<double, double>&>(a) == std::any_cast<const std::pair<double, double>&>(b);
    };
    gi.output_eq = close_eq();
    return gi;
  }

  // Best affine alpha/gamma between 1/x and x at the reciprocal vertices.
  GraphInterpretation wrong_affine() const {
    GraphInterpretation gi = base(wrong);
    std::vector<double> x;
    std::vector<double> inv;
    for (const auto& d : data) {
      const auto& p = std::any_cast<const std::pair<double, double>&>(d);
      x.push_back(p.first);
      inv.push_back(1.0 / p.first);
    }
    const auto a = affine_fit(inv, x);
    const auto g = affine_fit(x, inv);
    for (const int v : {5, 6}) {
      gi.alpha[static_cast<size_t>(v)] = affine(a);
      gi.gamma[static_cast<size_t>(v)] = affine(g);
    }
    return gi;
  }

  GraphInterpretation wrong_reciprocal() const {
    GraphInterpretation gi = base(wrong);
    const axioms::ValueFn r = [](const std::any& v) { return std::any(1.0 / num(v)); };
    gi.alpha[5] = gi.alpha[6] = gi.gamma[5] = gi.gamma[6] = r;
    return gi;
  }
};

}  // namespace axval::testing
