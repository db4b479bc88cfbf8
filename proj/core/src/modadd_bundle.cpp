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

#include "axval/pipeline/modadd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "axval/pipeline/twosat.hpp"

namespace axval::pipeline {

using abstract::CosSin;
using nn::Tensor64;

std::vector<int> auto_key_freqs(const model::Checkpoint& ck, int count) {
  const Tensor64 we = ck.params.at("embed.W_E").cast<double>();
  const int p = ck.config.vocab - 1;
  const int64_t d = we.dim(1);
  std::vector<std::pair<double, int>> norms;
  for (int k = 1; k <= p / 2; ++k) {
    double total = 0;
    for (int64_t j = 0; j < d; ++j) {
      double c = 0;
      double s = 0;
      for (int a = 0; a < p; ++a) {
        const double w = 2.0 * std::numbers::pi * k * a / p;
        c += std::cos(w) * we[a * d + j];
        s += std::sin(w) * we[a * d + j];
      }
      total += c * c + s * s;
    }
    norms.emplace_back(-total, k);
  }
  std::sort(norms.begin(), norms.end());
  std::vector<int> out;
  for (int i = 0; i < count && i < static_cast<int>(norms.size()); ++i) out.push_back(norms[static_cast<size_t>(i)].second);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<double> flat_encoding(const std::pair<CosSin, CosSin>& e) {
  std::vector<double> v;
  for (const auto* part : {&e.first.cos, &e.first.sin, &e.second.cos, &e.second.sin}) v.insert(v.end(), part->begin(), part->end());
  return v;
}

std::pair<CosSin, CosSin> unflatten_encoding(const std::vector<double>& v, size_t k, int decimals) {
  std::pair<CosSin, CosSin> e;
  auto take = [&](size_t off) {
    std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(off), v.begin() + static_cast<std::ptrdiff_t>(off + k));
    for (auto& x : out) x = abstract::round_to(x, decimals);
    return out;
  };
  e.first.cos = take(0);
  e.first.sin = take(k);
  e.second.cos = take(2 * k);
  e.second.sin = take(3 * k);
  return e;
}

std::vector<double> flat_sum(const CosSin& c) {
  std::vector<double> v(c.cos);
  v.insert(v.end(), c.sin.begin(), c.sin.end());
  return v;
}

CosSin unflatten_sum(const std::vector<double>& v, size_t k) {
  return CosSin{std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k)),
                std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(k), v.begin() + static_cast<std::ptrdiff_t>(2 * k))};
}

std::pair<int, int> operands(const std::vector<int32_t>& tokens, int64_t i, int64_t ctx) {
  return {tokens[static_cast<size_t>(i * ctx)], tokens[static_cast<size_t>(i * ctx + 1)]};
}

Tensor64 input_rows(const Tensor64& states) {
  const int64_t b = states.dim(0);
  const int64_t s = states.dim(1);
  const int64_t d = states.dim(2);
  Tensor64 x({b, 2 * d});
  for (int64_t i = 0; i < b; ++i) std::copy_n(states.ptr() + i * s * d, 2 * d, x.ptr() + i * 2 * d);
  return x;
}

Tensor64 concat_rows(const Tensor64& a, const Tensor64& b) {
  const int64_t n = a.dim(0);
  const int64_t da = a.dim(1);
  const int64_t db = b.dim(1);
  Tensor64 out({n, da + db});
  for (int64_t i = 0; i < n; ++i) {
    std::copy_n(a.ptr() + i * da, da, out.ptr() + i * (da + db));
    std::copy_n(b.ptr() + i * db, db, out.ptr() + i * (da + db) + da);
  }
  return out;
}

Tensor64 rows_of(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<int64_t>(rows.size());
  const auto w = static_cast<int64_t>(rows.empty() ? 0 : rows.front().size());
  Tensor64 t({n, w});
  for (int64_t i = 0; i < n; ++i) std::copy_n(rows[static_cast<size_t>(i)].data(), w, t.ptr() + i * w);
  return t;
}

}  // namespace

ModAddOperators fit_modadd_operators(const model::Decomposition<double>& d, const model::TokenData& train,
                                     const abstract::ModAddSpec& spec, double ridge) {
  abstract::ModAddSpec raw = spec;
  raw.decimals = -1;
  const Tensor64 states = d.embed_prefix(train.tokens, train.count);
  const auto [resid, hidden] = d.attend_hidden(states);
  std::vector<std::vector<double>> enc;
  std::vector<std::vector<double>> sums;
  for (int64_t i = 0; i < train.count; ++i) {
    const auto [a, b] = operands(train.tokens, i, train.context);
    const auto e = abstract::encoding_of_inputs(a, b, raw);
    enc.push_back(flat_encoding(e));
    sums.push_back(flat_sum(abstract::sum_of_angles(e).rep));
  }
  const Tensor64 enc_t = rows_of(enc);
  const Tensor64 sums_t = rows_of(sums);
  const Tensor64 all_states = states.reshaped({train.count, states.dim(1) * states.dim(2)});
  const Tensor64 mid = concat_rows(resid, hidden);
  ModAddOperators ops;
  ops.spec = spec;
  ops.alpha_1 = interp::fit_linear_map(input_rows(states), enc_t, ridge);
  ops.gamma_1 = interp::fit_linear_map(enc_t, all_states, ridge);
  ops.alpha_2 = interp::fit_linear_map(mid, sums_t, ridge);
  ops.gamma_2 = interp::fit_linear_map(sums_t, mid, ridge);
  return ops;
}

void store_modadd_operators(io::Container& c, const ModAddOperators& ops) {
  interp::store_linear_map(c, "alpha_1", ops.alpha_1);
  interp::store_linear_map(c, "gamma_1", ops.gamma_1);
  interp::store_linear_map(c, "alpha_2", ops.alpha_2);
  interp::store_linear_map(c, "gamma_2", ops.gamma_2);
  c.manifest["modadd"] = {{"modulus", ops.spec.modulus}, {"freqs", ops.spec.freqs}, {"decimals", ops.spec.decimals}};
}

ModAddOperators load_modadd_operators(const io::Container& c) {
  ModAddOperators ops;
  ops.alpha_1 = interp::load_linear_map(c, "alpha_1");
  ops.gamma_1 = interp::load_linear_map(c, "gamma_1");
  ops.alpha_2 = interp::load_linear_map(c, "alpha_2");
  ops.gamma_2 = interp::load_linear_map(c, "gamma_2");
  const auto& m = c.manifest.at("modadd");
  ops.spec.modulus = m.at("modulus").get<int>();
  ops.spec.freqs = m.at("freqs").get<std::vector<int>>();
  ops.spec.decimals = m.at("decimals").get<int>();
  return ops;
}

axioms::Bundle modadd_bundle(const model::Decomposition<double>& d, const ModAddOperators& ops) {
  using Pairs = std::vector<std::pair<CosSin, CosSin>>;
  using Sums = std::vector<CosSin>;
  using Mid = std::pair<Tensor64, Tensor64>;
  const auto k = ops.spec.freqs.size();
  const int64_t dm = d.config().d_model;
  const int64_t n = d.config().d_mlp;
  const int64_t ctx = d.config().context;
  auto gamma_2 = [&ops, dm, n](const Sums& sums) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : sums) rows.push_back(flat_sum(s));
    const Tensor64 mid = ops.gamma_2.apply_rows(rows_of(rows));
    const auto b = static_cast<int64_t>(sums.size());
    Tensor64 resid({b, dm});
    Tensor64 hidden({b, n});
    for (int64_t i = 0; i < b; ++i) {
      std::copy_n(mid.ptr() + i * (dm + n), dm, resid.ptr() + i * dm);
      std::copy_n(mid.ptr() + i * (dm + n) + dm, n, hidden.ptr() + i * n);
    }
    return Mid{std::move(resid), std::move(hidden)};
  };
  auto concrete_3 = [&d](const Mid& m) { return d.top_token(d.output_logits(m.first, m.second)); };
  auto abstract_3 = [&ops](const Sums& sums) {
    std::vector<int32_t> out;
    for (const auto& s : sums) out.push_back(abstract::difference_of_angles_argmax(s, ops.spec).c);
    return out;
  };
  axioms::Bundle b;
  b.concrete = {
      [&d](const std::any& x) {
        const auto& tb = std::any_cast<const TokenBatch&>(x);
        return std::any(d.embed_prefix(tb.tokens, tb.batch));
      },
      [&d](const std::any& x) { return std::any(d.attend_hidden(std::any_cast<const Tensor64&>(x))); },
      [concrete_3](const std::any& x) { return std::any(concrete_3(std::any_cast<const Mid&>(x))); },
  };
  b.abstract = {
      [&ops, ctx](const std::any& x) {
        const auto& tb = std::any_cast<const TokenBatch&>(x);
        Pairs out;
        for (int64_t i = 0; i < tb.batch; ++i) {
          const auto [a, c] = operands(tb.tokens, i, ctx);
          out.push_back(abstract::encoding_of_inputs(a, c, ops.spec));
        }
        return std::any(std::move(out));
      },
      [](const std::any& x) {
        Sums out;
        for (const auto& e : std::any_cast<const Pairs&>(x)) out.push_back(abstract::sum_of_angles(e).rep);
        return std::any(std::move(out));
      },
      [abstract_3](const std::any& x) { return std::any(abstract_3(std::any_cast<const Sums&>(x))); },
  };
  const axioms::Fn identity = [](const std::any& x) { return x; };
  b.alpha = {
      identity,
      [&ops, k](const std::any& x) {
        const Tensor64 y = ops.alpha_1.apply_rows(input_rows(std::any_cast<const Tensor64&>(x)));
        Pairs out;
        for (int64_t i = 0; i < y.dim(0); ++i) {
          const std::vector<double> row(y.ptr() + i * y.dim(1), y.ptr() + (i + 1) * y.dim(1));
          out.push_back(unflatten_encoding(row, k, ops.spec.decimals));
        }
        return std::any(std::move(out));
      },
      [&ops, k](const std::any& x) {
        const auto& m = std::any_cast<const Mid&>(x);
        const Tensor64 y = ops.alpha_2.apply_rows(concat_rows(m.first, m.second));
        Sums out;
        for (int64_t i = 0; i < y.dim(0); ++i) {
          out.push_back(unflatten_sum(std::vector<double>(y.ptr() + i * y.dim(1), y.ptr() + (i + 1) * y.dim(1)), k));
        }
        return std::any(std::move(out));
      },
      identity,
  };
  b.gamma = {
      identity,
      [&ops, &d](const std::any& x) {
        const auto& pairs = std::any_cast<const Pairs&>(x);
        std::vector<std::vector<double>> rows;
        for (const auto& e : pairs) rows.push_back(flat_encoding(e));
        const Tensor64 y = ops.gamma_1.apply_rows(rows_of(rows));
        return std::any(y.reshaped({y.dim(0), d.config().context, d.config().d_model}));
      },
      [gamma_2](const std::any& x) { return std::any(gamma_2(std::any_cast<const Sums&>(x))); },
      identity,
  };
  b.abstract_equal = {
      [](const std::any& a, const std::any& c) {
        const auto& x = std::any_cast<const TokenBatch&>(a);
        const auto& y = std::any_cast<const TokenBatch&>(c);
        std::vector<bool> out(static_cast<size_t>(x.batch));
        const auto w = static_cast<int64_t>(x.tokens.size()) / std::max<int64_t>(x.batch, 1);
        for (int64_t i = 0; i < x.batch; ++i) {
          out[static_cast<size_t>(i)] = std::equal(x.tokens.begin() + i * w, x.tokens.begin() + (i + 1) * w, y.tokens.begin() + i * w);
        }
        return out;
      },
      [](const std::any& a, const std::any& c) {
        const auto& x = std::any_cast<const Pairs&>(a);
        const auto& y = std::any_cast<const Pairs&>(c);
        std::vector<bool> out(x.size());
        for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] == y[i];
        return out;
      },
      [gamma_2, concrete_3, abstract_3](const std::any& a, const std::any& c) {
        const auto& x = std::any_cast<const Sums&>(a);
        const auto& y = std::any_cast<const Sums&>(c);
        const auto ax = abstract_3(x);
        const auto ay = abstract_3(y);
        const auto cx = concrete_3(gamma_2(x));
        const auto cy = concrete_3(gamma_2(y));
        std::vector<bool> out(x.size());
        for (size_t i = 0; i < x.size(); ++i) out[i] = ax[i] == ay[i] && cx[i] == cy[i];
        return out;
      },
      [](const std::any& a, const std::any& c) {
        const auto& x = std::any_cast<const std::vector<int32_t>&>(a);
        const auto& y = std::any_cast<const std::vector<int32_t>&>(c);
        std::vector<bool> out(x.size());
        for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] == y[i];
        return out;
      },
  };
  b.equality_mode = {"exact", "rounded-" + std::to_string(ops.spec.decimals), "downstream-equivalence", "exact"};
  b.output_equal = b.abstract_equal[3];
  return b;
}

}  // namespace axval::pipeline
