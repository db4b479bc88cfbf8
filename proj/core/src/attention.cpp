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

#include "axval/analysis/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace axval::analysis {

namespace {

Tensor64 as64(const model::Checkpoint& ck, const std::string& name) { return ck.params.at(name).cast<double>(); }

// [rows, cols] slice of columns [c0, c1).
std::vector<double> column_block(const Tensor64& w, int64_t c0, int64_t c1) {
  const int64_t rows = w.dim(0);
  const int64_t cols = w.dim(1);
  std::vector<double> out(static_cast<size_t>(rows * (c1 - c0)));
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = c0; c < c1; ++c) out[static_cast<size_t>(r * (c1 - c0) + c - c0)] = w[r * cols + c];
  }
  return out;
}

// x [d] times block [d, k] -> [k].
std::vector<double> vec_mat(const double* x, const std::vector<double>& m, int64_t d, int64_t k) {
  std::vector<double> y(static_cast<size_t>(k), 0.0);
  for (int64_t i = 0; i < d; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (int64_t j = 0; j < k; ++j) y[static_cast<size_t>(j)] += xi * m[static_cast<size_t>(i * k + j)];
  }
  return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double QKDecomposition::score(int32_t dst_tok, int64_t dst_pos, int32_t src_tok, int64_t src_pos) const {
  const int64_t v = tt.dim(0);
  const int64_t s = pp.dim(0);
  return tt[dst_tok * v + src_tok] + tp[dst_tok * s + src_pos] + pt[dst_pos * v + src_tok] + pp[dst_pos * s + src_pos];
}

QKDecomposition qk_decompose(const model::Checkpoint& ck, int head) {
  const auto& cfg = ck.config;
  const auto& bc = cfg.blocks.at(0);
  if (head < 0 || head >= bc.heads) throw std::out_of_range("head " + std::to_string(head));
  const int64_t d = cfg.d_model;
  const int64_t hd = bc.head_dim;
  const Tensor64 we = as64(ck, "embed.W_E");
  const Tensor64 wp = as64(ck, "embed.W_pos");
  const auto wq = column_block(as64(ck, model::block_param(0, "attn.W_Q")), head * hd, (head + 1) * hd);
  const auto wk = column_block(as64(ck, model::block_param(0, "attn.W_K")), head * hd, (head + 1) * hd);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  auto project = [&](const Tensor64& e, const std::vector<double>& w) {
    std::vector<std::vector<double>> out;
    for (int64_t r = 0; r < e.dim(0); ++r) out.push_back(vec_mat(e.ptr() + r * d, w, d, hd));
    return out;
  };
  const auto qe = project(we, wq);
  const auto qp = project(wp, wq);
  const auto ke = project(we, wk);
  const auto kp = project(wp, wk);
  auto table = [&](const std::vector<std::vector<double>>& q, const std::vector<std::vector<double>>& k) {
    Tensor64 t({static_cast<int64_t>(q.size()), static_cast<int64_t>(k.size())});
    for (size_t i = 0; i < q.size(); ++i) {
      for (size_t j = 0; j < k.size(); ++j) t[static_cast<int64_t>(i * k.size() + j)] = dot(q[i], k[j]) * scale;
    }
    return t;
  };
  return QKDecomposition{table(qe, ke), table(qe, kp), table(qp, ke), table(qp, kp)};
}

std::vector<int32_t> position_tokens(int64_t pos) {
  if (pos == sat::kReadout) return {sat::kColon};
  if (pos % 4 == 0) return {sat::kOpen};
  if (pos % 4 == 3) return {sat::kClose};
  std::vector<int32_t> lits;
  for (int32_t t = 0; t < 2 * sat::kVars; ++t) lits.push_back(t);
  return lits;
}

ExpectedAttention expected_attention(const QKDecomposition& qk, int clause) {
  if (clause < 0 || clause >= sat::kClauses) throw std::out_of_range("clause " + std::to_string(clause));
  const int64_t p = 4 * clause + 2;
  const int64_t s = qk.pp.dim(0);
  const auto dst_toks = position_tokens(p);
  ExpectedAttention out;
  out.scores.assign(static_cast<size_t>(s), 0.0);
  out.probs.assign(static_cast<size_t>(s), 0.0);
  for (int64_t q = 0; q <= p; ++q) {
    double e = 0;
    if (q == p) {
      for (const int32_t t : dst_toks) e += qk.score(t, p, t, p);
      e /= static_cast<double>(dst_toks.size());
    } else {
      const auto src_toks = position_tokens(q);
      for (const int32_t t : dst_toks) {
        for (const int32_t u : src_toks) e += qk.score(t, p, u, q);
      }
      e /= static_cast<double>(dst_toks.size() * src_toks.size());
    }
    out.scores[static_cast<size_t>(q)] = e;
  }
  const double mx = *std::max_element(out.scores.begin(), out.scores.begin() + p + 1);
  double z = 0;
  for (int64_t q = 0; q <= p; ++q) z += std::exp(out.scores[static_cast<size_t>(q)] - mx);
  for (int64_t q = 0; q <= p; ++q) out.probs[static_cast<size_t>(q)] = std::exp(out.scores[static_cast<size_t>(q)] - mx) / z;
  return out;
}

namespace {

// Extremes of score(src, dst) over formulas with token t at dst.
std::pair<double, double> score_range(const QKDecomposition& qk, int32_t t, int64_t dst, int64_t src) {
  if (src == dst) {
    const double v = qk.score(t, dst, t, dst);
    return {v, v};
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const int32_t u : position_tokens(src)) {
    const double v = qk.score(t, dst, u, src);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

ClauseWorstCase worstcase_attention(const QKDecomposition& qk, int clause) {
  if (clause < 0 || clause >= sat::kClauses) throw std::out_of_range("clause " + std::to_string(clause));
  const int64_t d = 4 * clause + 2;
  ClauseWorstCase out{1.0, 1.0};
  for (const int32_t t : position_tokens(d)) {
    const double first = score_range(qk, t, d, d - 1).first;
    const double self = score_range(qk, t, d, d).first;
    std::vector<double> rest;
    for (int64_t j = 0; j <= d - 2; ++j) rest.push_back(score_range(qk, t, d, j).second);
    const double self_max = score_range(qk, t, d, d).second;
    double m = std::max({first, self, self_max});
    for (const double r : rest) m = std::max(m, r);
    double rest_sum = 0;
    for (const double r : rest) rest_sum += std::exp(r - m);
    const double ef = std::exp(first - m);
    const double es = std::exp(self - m);
    const double es_max = std::exp(self_max - m);
    out.first_literal_min = std::min(out.first_literal_min, ef / (ef + rest_sum + es_max));
    out.clause_min = std::min(out.clause_min, (ef + es) / (ef + es + rest_sum));
  }
  return out;
}

std::pair<double, double> worstcase_colon(const QKDecomposition& qk) {
  const int64_t d = sat::kReadout;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int64_t j = 0; j <= d; ++j) {
    const auto [a, b] = score_range(qk, sat::kColon, d, j);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  const double others = static_cast<double>(d);
  const double min_w = 1.0 / (1.0 + others * std::exp(hi - lo));
  const double max_w = 1.0 / (1.0 + others * std::exp(lo - hi));
  return {min_w, max_w};
}

std::vector<double> neuron_output_coefficients(const model::Checkpoint& ck) {
  const int last = static_cast<int>(ck.config.blocks.size()) - 1;
  const Tensor64 wout = as64(ck, model::block_param(last, "mlp.W_out"));
  const Tensor64 wu = as64(ck, "unembed.W_U");
  const int64_t n = wout.dim(0);
  const int64_t d = wout.dim(1);
  const int64_t v = wu.dim(1);
  if (sat::kSat >= v) throw std::invalid_argument("checkpoint vocabulary has no SAT token");
  std::vector<double> coef(static_cast<size_t>(n), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t k = 0; k < d; ++k) coef[static_cast<size_t>(i)] += wout[i * d + k] * wu[k * v + sat::kSat];
  }
  return coef;
}

double unembed_negation_gap(const model::Checkpoint& ck) {
  const Tensor64 wu = as64(ck, "unembed.W_U");
  const int64_t d = wu.dim(0);
  const int64_t v = wu.dim(1);
  double s = 0;
  for (int64_t k = 0; k < d; ++k) {
    const double x = wu[k * v + sat::kSat] + wu[k * v + sat::kUnsat];
    s += x * x;
  }
  return std::sqrt(s);
}

SparsityResult sparsity_scan(const std::vector<double>& coefficients, const Tensor& hidden, double threshold,
                             double activity_floor) {
  const auto n = static_cast<int64_t>(coefficients.size());
  if (hidden.rank() != 2 || hidden.dim(1) != n) throw nn::ShapeError("sparsity_scan", hidden.shape(), nn::Shape{-1, n});
  SparsityResult r;
  r.mean_activation.assign(static_cast<size_t>(n), 0.0);
  const int64_t rows = hidden.dim(0);
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < n; ++j) r.mean_activation[static_cast<size_t>(j)] += hidden[i * n + j];
  }
  for (auto& m : r.mean_activation) m /= static_cast<double>(std::max<int64_t>(rows, 1));
  for (int64_t j = 0; j < n; ++j) {
    if (coefficients[static_cast<size_t>(j)] > threshold) {
      r.above_threshold.push_back(static_cast<int>(j));
      if (r.mean_activation[static_cast<size_t>(j)] >= activity_floor) r.evaluating.push_back(static_cast<int>(j));
    }
  }
  return r;
}

Tensor collect_hidden(const model::Decomposition<float>& d, const std::vector<int32_t>& tokens, int64_t count,
                      int64_t chunk) {
  const int64_t s = d.config().context;
  const int64_t n = d.config().d_mlp;
  Tensor out({count, n});
  for (int64_t start = 0; start < count; start += chunk) {
    const int64_t b = std::min(chunk, count - start);
    const std::vector<int32_t> part(tokens.begin() + start * s, tokens.begin() + (start + b) * s);
    const auto [resid, hidden] = d.attend_hidden(d.embed_prefix(part, b));
    std::copy(hidden.storage().begin(), hidden.storage().end(), out.storage().begin() + start * n);
  }
  return out;
}

std::string profile_condition_name(int condition) {
  if (condition == 0) return "SAT";
  if (condition == 1) return "UNSAT";
  return "phi[" + sat::pattern_of(static_cast<uint32_t>(condition - 2)) + "]";
}

ActivationProfiles activation_profiles(const Tensor& hidden, const std::vector<sat::FeatureProfile>& profiles) {
  const int64_t rows = hidden.dim(0);
  const int64_t n = hidden.dim(1);
  if (static_cast<int64_t>(profiles.size()) != rows) throw std::invalid_argument("activation_profiles: one profile per row required");
  std::vector<std::vector<double>> sums(kProfileConditions, std::vector<double>(static_cast<size_t>(n), 0.0));
  ActivationProfiles p;
  p.neurons = n;
  p.counts.assign(kProfileConditions, 0);
  auto add = [&](int cond, int64_t row) {
    ++p.counts[static_cast<size_t>(cond)];
    auto& s = sums[static_cast<size_t>(cond)];
    for (int64_t j = 0; j < n; ++j) s[static_cast<size_t>(j)] += hidden[row * n + j];
  };
  for (int64_t i = 0; i < rows; ++i) {
    const sat::FeatureProfile f = profiles[static_cast<size_t>(i)];
    add(f != 0 ? 0 : 1, i);
    for (int a = 0; a < sat::kAssignments; ++a) {
      if ((f >> a) & 1u) add(2 + a, i);
    }
  }
  p.means.assign(kProfileConditions, std::vector<std::optional<double>>(static_cast<size_t>(n)));
  for (int c = 0; c < kProfileConditions; ++c) {
    const int64_t cnt = p.counts[static_cast<size_t>(c)];
    if (cnt == 0) continue;
    for (int64_t j = 0; j < n; ++j) p.means[static_cast<size_t>(c)][static_cast<size_t>(j)] = sums[static_cast<size_t>(c)][static_cast<size_t>(j)] / static_cast<double>(cnt);
  }
  return p;
}

std::string profiles_csv(const ActivationProfiles& p, const std::vector<int>& neurons) {
  std::ostringstream out;
  out.precision(9);
  out << "neuron,condition,count,mean\n";
  for (const int j : neurons) {
    for (int c = 0; c < kProfileConditions; ++c) {
      out << j << ',' << profile_condition_name(c) << ',' << p.counts[static_cast<size_t>(c)] << ',';
      const auto& m = p.means[static_cast<size_t>(c)][static_cast<size_t>(j)];
      if (m) out << *m;
      out << '\n';
    }
  }
  return out.str();
}

PreactivationModel::PreactivationModel(const model::Decomposition<double>& dec, const interp::TwoSatOperators& ops) {
  const auto& cfg = dec.config();
  const auto& params = dec.params();
  const int last = static_cast<int>(cfg.blocks.size()) - 1;
  const auto& bc = cfg.blocks[static_cast<size_t>(last)];
  heads_ = bc.heads;
  const int64_t d = cfg.d_model;
  const int64_t hd = bc.head_dim;
  d_mlp_ = cfg.d_mlp;
  const int64_t n = d_mlp_;
  const int64_t s = cfg.context;
  const Tensor64& means = ops.means.block_out;
  if (means.dim(0) != s || means.dim(1) != d) throw nn::ShapeError("PreactivationModel", means.shape(), nn::Shape{s, d});
  const Tensor64& win = params.at(model::block_param(last, "mlp.W_in"));
  const Tensor64& bin = params.at(model::block_param(last, "mlp.b_in"));
  const Tensor64& wo = params.at(model::block_param(last, "attn.W_O"));
  const double* e_colon = means.ptr() + (s - 1) * d;
  auto proj_in = [&](const std::vector<double>& x) {
    std::vector<double> y(static_cast<size_t>(n), 0.0);
    for (int64_t k = 0; k < d; ++k) {
      for (int64_t j = 0; j < n; ++j) y[static_cast<size_t>(j)] += x[static_cast<size_t>(k)] * win[k * n + j];
    }
    return y;
  };
  c_ = proj_in(std::vector<double>(e_colon, e_colon + d));
  for (int64_t j = 0; j < n; ++j) c_[static_cast<size_t>(j)] += bin[j];
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  clause_scores_.assign(static_cast<size_t>(heads_), std::vector<double>(sat::kOrderedClauses));
  score_shift_.assign(static_cast<size_t>(heads_), 0.0);
  d_.assign(static_cast<size_t>(heads_), std::vector<double>(sat::kOrderedClauses));
  cvals_.assign(static_cast<size_t>(heads_), std::vector<std::vector<double>>(sat::kOrderedClauses));
  bg_d_.assign(static_cast<size_t>(heads_), 0.0);
  bg_c_.assign(static_cast<size_t>(heads_), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int h = 0; h < heads_; ++h) {
    const auto wq = column_block(params.at(model::block_param(last, "attn.W_Q")), h * hd, (h + 1) * hd);
    const auto wk = column_block(params.at(model::block_param(last, "attn.W_K")), h * hd, (h + 1) * hd);
    const auto wv = column_block(params.at(model::block_param(last, "attn.W_V")), h * hd, (h + 1) * hd);
    std::vector<double> wo_h(static_cast<size_t>(hd * d));
    for (int64_t r = 0; r < hd; ++r) {
      for (int64_t c = 0; c < d; ++c) wo_h[static_cast<size_t>(r * d + c)] = wo[(h * hd + r) * d + c];
    }
    const auto q = vec_mat(e_colon, wq, d, hd);
    auto score_of = [&](const double* x) { return dot(q, vec_mat(x, wk, d, hd)) * scale; };
    auto value_of = [&](const double* x) { return proj_in(vec_mat(vec_mat(x, wv, d, hd).data(), wo_h, hd, d)); };
    std::vector<double> bg_scores;
    std::vector<std::vector<double>> bg_vals;
    for (int64_t j = 0; j < s; ++j) {
      if (j < sat::kReadout && j % 4 == 2) continue;
      bg_scores.push_back(score_of(means.ptr() + j * d));
      bg_vals.push_back(value_of(means.ptr() + j * d));
    }
    std::vector<std::vector<double>> vals(sat::kOrderedClauses);
    for (int c = 0; c < sat::kOrderedClauses; ++c) {
      clause_scores_[static_cast<size_t>(h)][static_cast<size_t>(c)] = score_of(ops.table.rep(c));
      vals[static_cast<size_t>(c)] = value_of(ops.table.rep(c));
    }
    double shift = *std::max_element(clause_scores_[static_cast<size_t>(h)].begin(), clause_scores_[static_cast<size_t>(h)].end());
    for (const double b : bg_scores) shift = std::max(shift, b);
    score_shift_[static_cast<size_t>(h)] = shift;
    for (int c = 0; c < sat::kOrderedClauses; ++c) {
      const double e = std::exp(clause_scores_[static_cast<size_t>(h)][static_cast<size_t>(c)] - shift);
      d_[static_cast<size_t>(h)][static_cast<size_t>(c)] = e;
      auto& cv = cvals_[static_cast<size_t>(h)][static_cast<size_t>(c)];
      cv.resize(static_cast<size_t>(n));
      for (int64_t j = 0; j < n; ++j) cv[static_cast<size_t>(j)] = e * vals[static_cast<size_t>(c)][static_cast<size_t>(j)];
    }
    for (size_t b = 0; b < bg_scores.size(); ++b) {
      const double e = std::exp(bg_scores[b] - shift);
      bg_d_[static_cast<size_t>(h)] += e;
      for (int64_t j = 0; j < n; ++j) bg_c_[static_cast<size_t>(h)][static_cast<size_t>(j)] += e * bg_vals[b][static_cast<size_t>(j)];
    }
  }
}

double PreactivationModel::preactivation(int neuron, const std::vector<double>& counts, bool background) const {
  if (neuron < 0 || neuron >= d_mlp_) throw std::out_of_range("neuron " + std::to_string(neuron));
  if (counts.size() != sat::kOrderedClauses) throw std::invalid_argument("preactivation expects 100 clause counts");
  const auto sn = static_cast<size_t>(neuron);
  double total = c_[sn];
  for (int h = 0; h < heads_; ++h) {
    const auto sh = static_cast<size_t>(h);
    double num = background ? bg_c_[sh][sn] : 0.0;
    double den = background ? bg_d_[sh] : 0.0;
    for (int c = 0; c < sat::kOrderedClauses; ++c) {
      const double k = counts[static_cast<size_t>(c)];
      if (k == 0.0) continue;
      num += cvals_[sh][static_cast<size_t>(c)][sn] * k;
      den += d_[sh][static_cast<size_t>(c)] * k;
    }
    if (den <= 0.0) throw std::domain_error("preactivation: zero softmax denominator");
    total += num / den;
  }
  return total;
}

std::vector<double> clause_counts(const abstract::ClauseList& clauses) {
  std::vector<double> counts(sat::kOrderedClauses, 0.0);
  for (const auto& c : clauses) counts[static_cast<size_t>(c.index())] += 1.0;
  return counts;
}

std::string clause_preferences_csv(const PreactivationModel& m) {
  std::ostringstream out;
  out.precision(9);
  out << "head,left,right,score\n";
  for (int h = 0; h < m.heads(); ++h) {
    for (int c = 0; c < sat::kOrderedClauses; ++c) {
      const auto cl = sat::Clause::from_index(c);
      auto lit = [](const sat::Literal& l) { return std::string(l.neg ? "!x" : "x") + std::to_string(l.var); };
      out << h << ',' << lit(cl.l) << ',' << lit(cl.r) << ',' << m.clause_scores()[static_cast<size_t>(h)][static_cast<size_t>(c)] << '\n';
    }
  }
  return out.str();
}

}  // namespace axval::analysis
