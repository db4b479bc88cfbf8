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

#include "axval/axioms/graph.hpp"

#include <queue>
#include <stdexcept>

namespace axval::axioms {

int CompGraph::add_input(const std::string& name) {
  if (input_ >= 0) throw std::invalid_argument("graph already has an input vertex");
  vertices_.push_back(Vertex{name, nullptr, {}});
  input_ = static_cast<int>(vertices_.size() - 1);
  return input_;
}

int CompGraph::add(const std::string& name, Op op, std::vector<int> preds) {
  for (const int p : preds) {
    if (p < 0 || p >= static_cast<int>(vertices_.size() + 1)) throw std::out_of_range("predecessor " + std::to_string(p) + " of " + name);
  }
  vertices_.push_back(Vertex{name, std::move(op), std::move(preds)});
  return static_cast<int>(vertices_.size() - 1);
}

void CompGraph::set_output(int v) {
  if (v < 0 || v >= static_cast<int>(vertices_.size())) throw std::out_of_range("output vertex");
  output_ = v;
}

std::vector<int> CompGraph::topological_order() const {
  const int n = static_cast<int>(vertices_.size());
  std::vector<int> indeg(static_cast<size_t>(n), 0);
  std::vector<std::vector<int>> succ(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    for (const int p : vertices_[static_cast<size_t>(v)].preds) {
      if (p < 0 || p >= n) throw std::out_of_range("vertex " + std::to_string(v) + " has invalid predecessor");
      succ[static_cast<size_t>(p)].push_back(v);
      ++indeg[static_cast<size_t>(v)];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v) {
    if (indeg[static_cast<size_t>(v)] == 0) ready.push(v);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const int s : succ[static_cast<size_t>(v)]) {
      if (--indeg[static_cast<size_t>(s)] == 0) ready.push(s);
    }
  }
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("computational graph has a cycle");
  return order;
}

Env CompGraph::propagate(const std::map<int, std::any>& assign) const {
  if (input_ < 0) throw std::invalid_argument("graph has no input vertex");
  if (!assign.count(input_)) throw std::invalid_argument("propagate: input vertex not assigned");
  Env env(vertices_.size());
  for (const auto& [v, val] : assign) env.at(static_cast<size_t>(v)) = val;
  for (const int v : topological_order()) {
    if (assign.count(v)) continue;
    const Vertex& vx = vertices_[static_cast<size_t>(v)];
    if (!vx.op) throw std::invalid_argument("vertex " + vx.name + " has no operation and no value");
    std::vector<std::any> args;
    for (const int p : vx.preds) args.push_back(env[static_cast<size_t>(p)]);
    env[static_cast<size_t>(v)] = vx.op(args);
  }
  return env;
}

Env CompGraph::execute(const std::any& x) const { return propagate({{input_, x}}); }

void check_isomorphism(const CompGraph& g, const CompGraph& h, const std::vector<int>& pi) {
  const size_t n = g.size();
  if (h.size() != n || pi.size() != n) throw std::invalid_argument("graphs are not isomorphic: vertex counts differ");
  std::vector<bool> hit(n, false);
  for (const int p : pi) {
    if (p < 0 || p >= static_cast<int>(n) || hit[static_cast<size_t>(p)]) throw std::invalid_argument("Pi is not a bijection");
    hit[static_cast<size_t>(p)] = true;
  }
  if (pi[static_cast<size_t>(g.input())] != h.input()) throw std::invalid_argument("Pi does not map input to input");
  if (pi[static_cast<size_t>(g.output())] != h.output()) throw std::invalid_argument("Pi does not map output to output");
  for (size_t v = 0; v < n; ++v) {
    const auto& gp = g.vertex(static_cast<int>(v)).preds;
    const auto& hp = h.vertex(pi[v]).preds;
    if (gp.size() != hp.size()) throw std::invalid_argument("Pi does not preserve edges at vertex " + std::to_string(v));
    for (size_t k = 0; k < gp.size(); ++k) {
      if (pi[static_cast<size_t>(gp[k])] != hp[k]) throw std::invalid_argument("Pi does not preserve edges at vertex " + std::to_string(v));
    }
  }
}

void GraphInterpretation::validate() const {
  if (!concrete || !abstract) throw std::invalid_argument("graph interpretation needs both graphs");
  check_isomorphism(*concrete, *abstract, pi);
  const size_t n = concrete->size();
  if (alpha.size() != n || gamma.size() != n || abstract_eq.size() != n) throw std::invalid_argument("per-vertex operator count mismatch");
  if (!output_eq) throw std::invalid_argument("missing output equality");
}

std::vector<std::array<Counts, 4>> check_graph_axioms(const GraphInterpretation& gi, const std::vector<std::any>& dataset) {
  gi.validate();
  const CompGraph& g = *gi.concrete;
  const CompGraph& h = *gi.abstract;
  const int n = static_cast<int>(g.size());
  const int in = g.input();
  const int out = g.output();
  std::vector<std::array<Counts, 4>> counts(static_cast<size_t>(n));
  for (const std::any& x : dataset) {
    const Env c = g.execute(x);
    const std::any a_in = gi.alpha[static_cast<size_t>(in)](x);
    const Env hx = h.execute(a_in);
    std::vector<std::any> a(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) a[static_cast<size_t>(v)] = gi.alpha[static_cast<size_t>(v)](c[static_cast<size_t>(v)]);
    for (int v = 0; v < n; ++v) {
      const auto sv = static_cast<size_t>(v);
      const int pv = gi.pi[sv];
      const auto spv = static_cast<size_t>(pv);
      const ValueEq& eq = gi.abstract_eq[spv];
      auto& row = counts[sv];
      // prefix equivalence
      row[0].n++;
      row[0].violations += eq(a[sv], hx[spv]) ? 0 : 1;
      // component equivalence
      std::map<int, std::any> assign_h{{gi.pi[static_cast<size_t>(in)], a[static_cast<size_t>(in)]}};
      for (const int p : g.vertex(v).preds) assign_h[gi.pi[static_cast<size_t>(p)]] = a[static_cast<size_t>(p)];
      const Env hc = h.propagate(assign_h);
      row[1].n++;
      row[1].violations += eq(a[sv], hc[spv]) ? 0 : 1;
      // prefix replaceability
      const auto gamma_in = gi.gamma[static_cast<size_t>(gi.pi[static_cast<size_t>(in)])];
      std::map<int, std::any> assign_c{{in, gamma_in(hx[static_cast<size_t>(gi.pi[static_cast<size_t>(in)])])}};
      assign_c[v] = gi.gamma[spv](hx[spv]);
      row[2].n++;
      row[2].violations += gi.output_eq(c[static_cast<size_t>(out)], g.propagate(assign_c)[static_cast<size_t>(out)]) ? 0 : 1;
      // component replaceability
      std::map<int, std::any> assign_r{{in, gamma_in(hc[static_cast<size_t>(gi.pi[static_cast<size_t>(in)])])}};
      assign_r[v] = gi.gamma[spv](hc[spv]);
      row[3].n++;
      row[3].violations += gi.output_eq(c[static_cast<size_t>(out)], g.propagate(assign_r)[static_cast<size_t>(out)]) ? 0 : 1;
    }
  }
  return counts;
}

Counts check_graph_axiom(Axiom kind, const GraphInterpretation& gi, int v, const std::vector<std::any>& dataset) {
  const auto all = check_graph_axioms(gi, dataset);
  return all.at(static_cast<size_t>(v))[static_cast<size_t>(static_cast<int>(kind) - 1)];
}

Env execute_interleaved(const GraphInterpretation& gi, const std::vector<bool>& swapped, const std::any& x) {
  const CompGraph& g = *gi.concrete;
  const CompGraph& h = *gi.abstract;
  const size_t n = g.size();
  if (swapped.size() != n) throw std::invalid_argument("swap mask size mismatch");
  Env env(n);
  const auto in = static_cast<size_t>(g.input());
  env[in] = swapped[in] ? gi.alpha[in](x) : x;
  for (const int v : g.topological_order()) {
    const auto sv = static_cast<size_t>(v);
    if (sv == in) continue;
    std::vector<std::any> args;
    for (const int p : g.vertex(v).preds) {
      const auto sp = static_cast<size_t>(p);
      if (swapped[sv] == swapped[sp]) {
        args.push_back(env[sp]);
      } else if (swapped[sv]) {
        args.push_back(gi.alpha[sp](env[sp]));
      } else {
        args.push_back(gi.gamma[static_cast<size_t>(gi.pi[sp])](env[sp]));
      }
    }
    env[sv] = swapped[sv] ? h.vertex(gi.pi[sv]).op(args) : g.vertex(v).op(args);
  }
  return env;
}

Env conditional_abstract(const GraphInterpretation& gi, const std::vector<bool>& swapped, const Env& values) {
  Env out(values.size());
  for (size_t v = 0; v < values.size(); ++v) out[v] = swapped[v] ? values[v] : gi.alpha[v](values[v]);
  return out;
}

std::vector<ParallelResult> check_parallel_equivalence(const GraphInterpretation& gi, const std::vector<std::any>& dataset) {
  gi.validate();
  const size_t n = gi.concrete->size();
  if (n > 10) throw std::invalid_argument("parallel-intervention check limited to graphs with at most 10 vertices");
  std::vector<ParallelResult> out;
  for (uint32_t subset = 0; subset < (1u << n); ++subset) {
    std::vector<bool> swapped(n);
    for (size_t v = 0; v < n; ++v) swapped[v] = ((subset >> v) & 1u) != 0;
    std::vector<Counts> counts(n);
    for (const std::any& x : dataset) {
      // Both sides are compared in abstract space.
      const Env lhs = conditional_abstract(gi, std::vector<bool>(n, false), gi.concrete->execute(x));
      const Env mixed = execute_interleaved(gi, swapped, x);
      const Env rhs = conditional_abstract(gi, swapped, mixed);
      for (size_t v = 0; v < n; ++v) {
        counts[v].n++;
        counts[v].violations += gi.abstract_eq[static_cast<size_t>(gi.pi[v])](lhs[v], rhs[v]) ? 0 : 1;
      }
    }
    for (size_t v = 0; v < n; ++v) out.push_back(ParallelResult{subset, static_cast<int>(v), counts[v]});
  }
  return out;
}

Linearization linearize(const CompGraph& g) {
  if (g.input() < 0 || g.output() < 0) throw std::invalid_argument("linearize: graph needs exactly one input and one output");
  Linearization lin;
  lin.order = g.topological_order();
  if (lin.order.front() != g.input()) throw std::invalid_argument("linearize: input vertex must come first in topological order");
  const size_t n = g.size();
  const int in = g.input();
  const int out = g.output();
  for (size_t v = 0; v < n; ++v) {
    if (static_cast<int>(v) != in && g.vertex(static_cast<int>(v)).preds.empty()) {
      throw std::invalid_argument("linearize: vertex " + g.vertex(static_cast<int>(v)).name + " is a second input");
    }
  }
  lin.components.push_back([n, in](const std::any& x) {
    Env env(n);
    env[static_cast<size_t>(in)] = x;
    return std::any(env);
  });
  for (size_t k = 1; k < lin.order.size(); ++k) {
    const int v = lin.order[k];
    const bool last = k + 1 == lin.order.size();
    lin.components.push_back([&g, v, last, out](const std::any& e) {
      Env env = std::any_cast<const Env&>(e);
      std::vector<std::any> args;
      for (const int p : g.vertex(v).preds) {
        if (!env[static_cast<size_t>(p)].has_value()) throw std::invalid_argument("execute_op: predecessor undefined");
        args.push_back(env[static_cast<size_t>(p)]);
      }
      env[static_cast<size_t>(v)] = g.vertex(v).op(args);
      if (last) return env[static_cast<size_t>(out)];
      return std::any(env);
    });
  }
  return lin;
}

Fn batched(ValueFn f) {
  return [f = std::move(f)](const std::any& batch) {
    const auto& xs = std::any_cast<const std::vector<std::any>&>(batch);
    std::vector<std::any> ys;
    ys.reserve(xs.size());
    for (const auto& x : xs) ys.push_back(f(x));
    return std::any(std::move(ys));
  };
}

Eq batched_eq(ValueEq f) {
  return [f = std::move(f)](const std::any& a, const std::any& b) {
    const auto& xs = std::any_cast<const std::vector<std::any>&>(a);
    const auto& ys = std::any_cast<const std::vector<std::any>&>(b);
    if (xs.size() != ys.size()) throw std::invalid_argument("batch sizes differ");
    std::vector<bool> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i], ys[i]);
    return out;
  };
}

Bundle linearized_bundle(const GraphInterpretation& gi) {
  gi.validate();
  const CompGraph& g = *gi.concrete;
  const CompGraph& h = *gi.abstract;
  const Linearization lg = linearize(g);
  const size_t l = lg.components.size();
  // Abstract step k executes Pi(order_g[k]).
  std::vector<ValueFn> habs;
  const size_t n = g.size();
  const int hin = h.input();
  const int hout = h.output();
  habs.push_back([n, hin](const std::any& x) {
    Env env(n);
    env[static_cast<size_t>(hin)] = x;
    return std::any(env);
  });
  for (size_t k = 1; k < l; ++k) {
    const int v = gi.pi[static_cast<size_t>(lg.order[k])];
    const bool last = k + 1 == l;
    habs.push_back([&h, v, last, hout](const std::any& e) {
      Env env = std::any_cast<const Env&>(e);
      std::vector<std::any> args;
      for (const int p : h.vertex(v).preds) {
        if (!env[static_cast<size_t>(p)].has_value()) throw std::invalid_argument("execute_op: predecessor undefined");
        args.push_back(env[static_cast<size_t>(p)]);
      }
      env[static_cast<size_t>(v)] = h.vertex(v).op(args);
      if (last) return env[static_cast<size_t>(hout)];
      return std::any(env);
    });
  }
  const auto pi = gi.pi;
  ValueFn alpha_env = [&gi, pi](const std::any& e) {
    const auto& env = std::any_cast<const Env&>(e);
    Env out(env.size());
    for (size_t v = 0; v < env.size(); ++v) {
      if (env[v].has_value()) out[static_cast<size_t>(pi[v])] = gi.alpha[v](env[v]);
    }
    return std::any(out);
  };
  ValueFn gamma_env = [&gi, pi](const std::any& e) {
    const auto& env = std::any_cast<const Env&>(e);
    Env out(env.size());
    for (size_t v = 0; v < env.size(); ++v) {
      const auto pv = static_cast<size_t>(pi[v]);
      if (env[pv].has_value()) out[v] = gi.gamma[pv](env[pv]);
    }
    return std::any(out);
  };
  ValueEq env_eq = [&gi](const std::any& a, const std::any& b) {
    const auto& x = std::any_cast<const Env&>(a);
    const auto& y = std::any_cast<const Env&>(b);
    for (size_t v = 0; v < x.size(); ++v) {
      if (x[v].has_value() != y[v].has_value()) return false;
      if (x[v].has_value() && !gi.abstract_eq[v](x[v], y[v])) return false;
    }
    return true;
  };
  const auto in = static_cast<size_t>(g.input());
  const auto out = static_cast<size_t>(g.output());
  Bundle b;
  for (size_t k = 0; k < l; ++k) {
    b.concrete.push_back(batched(lg.components[k]));
    b.abstract.push_back(batched(habs[k]));
  }
  b.alpha.push_back(batched(gi.alpha[in]));
  b.gamma.push_back(batched(gi.gamma[static_cast<size_t>(gi.pi[in])]));
  b.abstract_equal.push_back(batched_eq(gi.abstract_eq[static_cast<size_t>(gi.pi[in])]));
  b.equality_mode.push_back("vertex");
  for (size_t k = 1; k < l; ++k) {
    b.alpha.push_back(batched(alpha_env));
    b.gamma.push_back(batched(gamma_env));
    b.abstract_equal.push_back(batched_eq(env_eq));
    b.equality_mode.push_back("environment");
  }
  b.alpha.push_back(batched(gi.alpha[out]));
  b.gamma.push_back(batched(gi.gamma[static_cast<size_t>(gi.pi[out])]));
  b.abstract_equal.push_back(batched_eq(gi.abstract_eq[static_cast<size_t>(gi.pi[out])]));
  b.equality_mode.push_back("vertex");
  b.output_equal = batched_eq(gi.output_eq);
  return b;
}

}  // namespace axval::axioms
