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

#include "axval/pipeline/twosat.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace axval::pipeline {

using axioms::Eq;
using axioms::Fn;
using nn::Tensor;

std::vector<std::any> token_batches(const model::TokenData& data, int64_t batch_size, int64_t limit) {
  if (batch_size <= 0) throw std::invalid_argument("batch size must be positive");
  const int64_t count = limit > 0 ? std::min(limit, data.count) : data.count;
  std::vector<std::any> out;
  for (int64_t start = 0; start < count; start += batch_size) {
    const int64_t b = std::min(batch_size, count - start);
    TokenBatch tb;
    tb.batch = b;
    tb.tokens.assign(data.tokens.begin() + start * data.context, data.tokens.begin() + (start + b) * data.context);
    out.emplace_back(std::move(tb));
  }
  return out;
}

abstract::ClauseList noisy_parse(std::span<const int32_t> tokens, double rate, uint64_t seed) {
  abstract::ClauseList clauses = abstract::parse_clauses(tokens);
  if (rate <= 0.0) return clauses;
  uint64_t h = 1469598103934665603ull ^ seed;
  for (const int32_t t : tokens) {
    h ^= static_cast<uint64_t>(t) + 1;
    h *= 1099511628211ull;
  }
  std::mt19937_64 rng(h);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, sat::kOrderedClauses - 1);
  for (auto& c : clauses) {
    const bool replace = coin(rng) < rate;
    const int idx = pick(rng);
    if (replace) c = sat::Clause::from_index(idx);
  }
  return clauses;
}

namespace {

template <typename T>
Eq elementwise_eq() {
  return [](const std::any& a, const std::any& b) {
    const auto& x = std::any_cast<const std::vector<T>&>(a);
    const auto& y = std::any_cast<const std::vector<T>&>(b);
    if (x.size() != y.size()) throw std::invalid_argument("batch sizes differ");
    std::vector<bool> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] == y[i];
    return out;
  };
}

}  // namespace

axioms::Bundle twosat_bundle(const model::Decomposition<float>& model, const interp::TwoSatOperators& ops,
                             const std::vector<abstract::NeuronInterpretation>& interps,
                             const TwoSatBundleOptions& options) {
  if (interps.size() != ops.evaluating.size()) throw std::invalid_argument("interpretation count differs from evaluating neuron count");
  for (size_t j = 0; j < interps.size(); ++j) {
    if (interps[j].neuron != ops.evaluating[j]) throw std::invalid_argument("interpretation order differs from evaluating neuron order");
  }
  const int64_t d_mlp = model.config().d_mlp;
  const int64_t ctx = model.config().context;
  axioms::Bundle b;
  b.concrete = {
      [&model](const std::any& x) {
        const auto& tb = std::any_cast<const TokenBatch&>(x);
        return std::any(model.embed_prefix(tb.tokens, tb.batch));
      },
      [&model](const std::any& x) { return std::any(model.attend_hidden(std::any_cast<const Tensor&>(x))); },
      [&model](const std::any& x) {
        const auto& [resid, hidden] = std::any_cast<const std::pair<Tensor, Tensor>&>(x);
        std::vector<int32_t> top = model.top_token(model.output_logits(resid, hidden));
        for (auto& t : top) t = t == sat::kSat ? sat::kSat : sat::kUnsat;
        return std::any(std::move(top));
      },
  };
  b.abstract = {
      [options, ctx](const std::any& x) {
        const auto& tb = std::any_cast<const TokenBatch&>(x);
        std::vector<abstract::ClauseList> out;
        out.reserve(static_cast<size_t>(tb.batch));
        for (int64_t i = 0; i < tb.batch; ++i) {
          const std::span<const int32_t> row(tb.tokens.data() + i * ctx, static_cast<size_t>(ctx));
          out.push_back(noisy_parse(row, options.noise_rate, options.noise_seed));
        }
        return std::any(std::move(out));
      },
      [&interps](const std::any& x) {
        const auto& cls = std::any_cast<const std::vector<abstract::ClauseList>&>(x);
        std::vector<abstract::Activations> out;
        out.reserve(cls.size());
        for (const auto& c : cls) out.push_back(abstract::evaluate_satisfiability(c, interps));
        return std::any(std::move(out));
      },
      [](const std::any& x) {
        const auto& acts = std::any_cast<const std::vector<abstract::Activations>&>(x);
        std::vector<int32_t> out;
        out.reserve(acts.size());
        for (const auto& a : acts) out.push_back(abstract::predict_satisfiability(a) ? sat::kSat : sat::kUnsat);
        return std::any(std::move(out));
      },
  };
  const Fn identity = [](const std::any& x) { return x; };
  b.alpha = {
      identity,
      [&ops](const std::any& x) { return std::any(ops.alpha_1(std::any_cast<const Tensor&>(x))); },
      [&ops](const std::any& x) { return std::any(ops.alpha_2(std::any_cast<const std::pair<Tensor, Tensor>&>(x).second)); },
      identity,
  };
  b.gamma = {
      identity,
      [&ops](const std::any& x) { return std::any(ops.gamma_1<float>(std::any_cast<const std::vector<abstract::ClauseList>&>(x))); },
      [&ops, d_mlp](const std::any& x) {
        return std::any(ops.gamma_2<float>(std::any_cast<const std::vector<abstract::Activations>&>(x), d_mlp));
      },
      identity,
  };
  const bool ordered = options.order_sensitive;
  b.abstract_equal = {
      [](const std::any& a, const std::any& c) {
        const auto& x = std::any_cast<const TokenBatch&>(a);
        const auto& y = std::any_cast<const TokenBatch&>(c);
        if (x.batch != y.batch) throw std::invalid_argument("batch sizes differ");
        std::vector<bool> out(static_cast<size_t>(x.batch));
        const auto w = static_cast<int64_t>(x.tokens.size()) / std::max<int64_t>(x.batch, 1);
        for (int64_t i = 0; i < x.batch; ++i) {
          out[static_cast<size_t>(i)] = std::equal(x.tokens.begin() + i * w, x.tokens.begin() + (i + 1) * w, y.tokens.begin() + i * w);
        }
        return out;
      },
      [ordered](const std::any& a, const std::any& c) {
        const auto& x = std::any_cast<const std::vector<abstract::ClauseList>&>(a);
        const auto& y = std::any_cast<const std::vector<abstract::ClauseList>&>(c);
        if (x.size() != y.size()) throw std::invalid_argument("batch sizes differ");
        std::vector<bool> out(x.size());
        for (size_t i = 0; i < x.size(); ++i) out[i] = ordered ? abstract::clauses_equal_ordered(x[i], y[i]) : abstract::clauses_equal(x[i], y[i]);
        return out;
      },
      elementwise_eq<abstract::Activations>(),
      elementwise_eq<int32_t>(),
  };
  b.equality_mode = {"exact", ordered ? "ordered-clauses" : "unordered-clauses", "exact", "exact"};
  b.output_equal = elementwise_eq<int32_t>();
  return b;
}

}  // namespace axval::pipeline
