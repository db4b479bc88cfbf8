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

#include "axval/interp/operators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "axval/sat/formula.hpp"

namespace axval::interp {

using nn::Tensor;
using nn::Tensor64;

MaskVariant parse_mask_variant(const std::string& s) {
  if (s == "prose") return MaskVariant::kProse;
  if (s == "listing") return MaskVariant::kListing;
  throw std::invalid_argument("unknown mask variant '" + s + "' (expected prose or listing)");
}

std::string mask_variant_name(MaskVariant v) { return v == MaskVariant::kProse ? "prose" : "listing"; }

std::shared_ptr<const nn::AttentionMask> canonical_mask(MaskVariant v) {
  auto m = std::make_shared<nn::AttentionMask>(nn::AttentionMask::causal(sat::kContext));
  for (int i = 0; i < sat::kClauses; ++i) {
    const int64_t q = 4 * i + 2;
    for (int64_t k = 0; k < m->cols; ++k) m->allow[static_cast<size_t>(q * m->cols + k)] = 0;
    const int64_t first = v == MaskVariant::kProse ? 4 * i + 1 : 4 * i;
    for (int64_t k = first; k <= q; ++k) m->allow[static_cast<size_t>(q * m->cols + k)] = 1;
  }
  return m;
}

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

const RowMat& unit_rows(const CanonicalTable& t, RowMat& storage) {
  const int64_t n = t.reps.dim(0);
  const int64_t d = t.reps.dim(1);
  storage = Eigen::Map<const RowMat>(t.reps.ptr(), n, d);
  for (int64_t i = 0; i < n; ++i) {
    const double norm = storage.row(i).norm();
    if (norm > 0) storage.row(i) /= norm;
  }
  return storage;
}

template <typename V>
MatchResult nearest_impl(const CanonicalTable& table, const V* v, int64_t dim) {
  const int64_t n = table.reps.dim(0);
  if (dim != table.reps.dim(1)) throw nn::ShapeError("nearest_clause", "vector dim " + std::to_string(dim) + " vs table dim " + std::to_string(table.reps.dim(1)));
  double vn = 0;
  for (int64_t k = 0; k < dim; ++k) vn += static_cast<double>(v[k]) * static_cast<double>(v[k]);
  vn = std::sqrt(vn);
  MatchResult best{0, false, -std::numeric_limits<double>::infinity()};
  for (int64_t c = 0; c < n; ++c) {
    const double* r = table.rep(static_cast<int>(c));
    double dot = 0;
    double rn = 0;
    for (int64_t k = 0; k < dim; ++k) {
      dot += static_cast<double>(v[k]) * r[k];
      rn += r[k] * r[k];
    }
    const double cs = (vn > 0 && rn > 0) ? dot / (vn * std::sqrt(rn)) : 0.0;
    if (cs > best.cosine) {
      best = MatchResult{static_cast<int>(c), false, cs};
    } else if (cs == best.cosine) {
      best.tie = true;
    }
  }
  return best;
}

}  // namespace

MatchResult nearest_clause(const CanonicalTable& table, const float* v, int64_t dim) { return nearest_impl(table, v, dim); }
MatchResult nearest_clause(const CanonicalTable& table, const double* v, int64_t dim) { return nearest_impl(table, v, dim); }

CanonicalTable build_canonical_table(const model::Decomposition<double>& d, MaskVariant v) {
  const int64_t s = sat::kContext;
  const int64_t dm = d.config().d_model;
  std::vector<int32_t> tokens;
  tokens.reserve(static_cast<size_t>(sat::kOrderedClauses * s));
  for (int c = 0; c < sat::kOrderedClauses; ++c) {
    sat::Formula f;
    f.fill(sat::Clause::from_index(c));
    const auto t = sat::tokenize(f);
    tokens.insert(tokens.end(), t.begin(), t.end());
  }
  const Tensor64 states = d.embed_prefix(tokens, sat::kOrderedClauses, canonical_mask(v));
  CanonicalTable table;
  table.variant = v;
  table.reps = Tensor64({sat::kOrderedClauses, dm});
  for (int c = 0; c < sat::kOrderedClauses; ++c) {
    double* out = table.reps.ptr() + c * dm;
    for (int i = 0; i < sat::kClauses; ++i) {
      const double* row = states.ptr() + (static_cast<int64_t>(c) * s + 4 * i + 2) * dm;
      for (int64_t k = 0; k < dm; ++k) out[k] += row[k] / sat::kClauses;
    }
  }
  for (int c = 0; c < sat::kOrderedClauses; ++c) {
    const MatchResult m = nearest_clause(table, table.rep(c), dm);
    if (m.clause != c) {
      throw std::runtime_error("canonical representation of clause " + std::to_string(c) + " is closer to clause " +
                               std::to_string(m.clause));
    }
  }
  return table;
}

TrainingMeans compute_training_means(const model::Decomposition<float>& d, const std::vector<int32_t>& tokens,
                                     int64_t count, int64_t chunk) {
  if (count <= 0) throw std::invalid_argument("training means need at least one sample");
  const auto& cfg = d.config();
  const int64_t s = cfg.context;
  const int64_t dm = cfg.d_model;
  TrainingMeans m;
  m.block_out = Tensor64({s, dm});
  m.attn_resid = Tensor64({dm});
  for (int64_t start = 0; start < count; start += chunk) {
    const int64_t b = std::min(chunk, count - start);
    const std::vector<int32_t> part(tokens.begin() + start * s, tokens.begin() + (start + b) * s);
    const Tensor states = d.embed_prefix(part, b);
    const auto [resid, hidden] = d.attend_hidden(states);
    for (int64_t i = 0; i < b; ++i) {
      for (int64_t k = 0; k < s * dm; ++k) m.block_out[k] += states[i * s * dm + k];
      for (int64_t k = 0; k < dm; ++k) m.attn_resid[k] += resid[i * dm + k];
    }
  }
  for (auto& x : m.block_out.storage()) x /= static_cast<double>(count);
  for (auto& x : m.attn_resid.storage()) x /= static_cast<double>(count);
  return m;
}

std::vector<abstract::ClauseList> TwoSatOperators::alpha_1(const Tensor& states) const {
  const int64_t b = states.dim(0);
  const int64_t s = states.dim(1);
  const int64_t dm = states.dim(2);
  if (s != sat::kContext) throw nn::ShapeError("alpha_1", states.shape(), nn::Shape{b, sat::kContext, dm});
  RowMat unit;
  unit_rows(table, unit);
  const int64_t rows = b * sat::kClauses;
  RowMat q(rows, dm);
  for (int64_t i = 0; i < b; ++i) {
    for (int c = 0; c < sat::kClauses; ++c) {
      const float* src = states.ptr() + (i * s + 4 * c + 2) * dm;
      for (int64_t k = 0; k < dm; ++k) q(i * sat::kClauses + c, k) = src[k];
    }
  }
  const RowMat dots = q * unit.transpose();
  std::vector<abstract::ClauseList> out(static_cast<size_t>(b), abstract::ClauseList(sat::kClauses));
  for (int64_t r = 0; r < rows; ++r) {
    Eigen::Index best = 0;
    double bv = dots(r, 0);
    bool tie = false;
    for (Eigen::Index c = 1; c < dots.cols(); ++c) {
      if (dots(r, c) > bv) {
        bv = dots(r, c);
        best = c;
        tie = false;
      } else if (dots(r, c) == bv) {
        tie = true;
      }
    }
    if (tie) ++alpha1_ties;
    out[static_cast<size_t>(r / sat::kClauses)][static_cast<size_t>(r % sat::kClauses)] = sat::Clause::from_index(static_cast<int>(best));
  }
  return out;
}

template <typename T>
nn::BasicTensor<T> TwoSatOperators::gamma_1(const std::vector<abstract::ClauseList>& clauses) const {
  const int64_t s = means.block_out.dim(0);
  const int64_t dm = means.block_out.dim(1);
  const auto b = static_cast<int64_t>(clauses.size());
  nn::BasicTensor<T> out({b, s, dm});
  for (int64_t i = 0; i < b; ++i) {
    T* dst = out.ptr() + i * s * dm;
    for (int64_t k = 0; k < s * dm; ++k) dst[k] = static_cast<T>(means.block_out[k]);
    const auto& cl = clauses[static_cast<size_t>(i)];
    if (cl.size() != sat::kClauses) throw std::invalid_argument("gamma_1 expects 10 clauses per formula");
    for (int c = 0; c < sat::kClauses; ++c) {
      const double* rep = table.rep(cl[static_cast<size_t>(c)].index());
      T* row = dst + (4 * c + 2) * dm;
      for (int64_t k = 0; k < dm; ++k) row[k] = static_cast<T>(rep[k]);
    }
  }
  return out;
}

std::vector<abstract::Activations> TwoSatOperators::alpha_2(const Tensor& hidden) const {
  const int64_t b = hidden.dim(0);
  const int64_t n = hidden.dim(1);
  std::vector<abstract::Activations> out(static_cast<size_t>(b), abstract::Activations(evaluating.size()));
  for (int64_t i = 0; i < b; ++i) {
    for (size_t j = 0; j < evaluating.size(); ++j) {
      const int neuron = evaluating[j];
      if (neuron < 0 || neuron >= n) throw std::out_of_range("evaluating neuron " + std::to_string(neuron));
      out[static_cast<size_t>(i)][j] = hidden[i * n + neuron] >= threshold;
    }
  }
  return out;
}

template <typename T>
std::pair<nn::BasicTensor<T>, nn::BasicTensor<T>> TwoSatOperators::gamma_2(const std::vector<abstract::Activations>& acts,
                                                                             int64_t d_mlp) const {
  const auto b = static_cast<int64_t>(acts.size());
  const int64_t dm = means.attn_resid.dim(0);
  nn::BasicTensor<T> resid({b, dm});
  nn::BasicTensor<T> hidden({b, d_mlp});
  for (int64_t i = 0; i < b; ++i) {
    for (int64_t k = 0; k < dm; ++k) resid[i * dm + k] = static_cast<T>(means.attn_resid[k]);
    const auto& a = acts[static_cast<size_t>(i)];
    if (a.size() != evaluating.size()) throw std::invalid_argument("gamma_2 activation count mismatch");
    for (size_t j = 0; j < a.size(); ++j) {
      if (a[j]) hidden[i * d_mlp + evaluating[j]] = static_cast<T>(high_activation);
    }
  }
  return {std::move(resid), std::move(hidden)};
}

template nn::BasicTensor<float> TwoSatOperators::gamma_1<float>(const std::vector<abstract::ClauseList>&) const;
template nn::BasicTensor<double> TwoSatOperators::gamma_1<double>(const std::vector<abstract::ClauseList>&) const;
template std::pair<Tensor, Tensor> TwoSatOperators::gamma_2<float>(const std::vector<abstract::Activations>&, int64_t) const;
template std::pair<Tensor64, Tensor64> TwoSatOperators::gamma_2<double>(const std::vector<abstract::Activations>&, int64_t) const;

std::vector<double> LinearMap::apply(const double* x) const {
  const int64_t in = in_dim();
  const int64_t out = out_dim();
  std::vector<double> y(b.storage());
  for (int64_t i = 0; i < in; ++i) {
    for (int64_t j = 0; j < out; ++j) y[static_cast<size_t>(j)] += x[i] * a[i * out + j];
  }
  return y;
}

Tensor64 LinearMap::apply_rows(const Tensor64& x) const {
  if (x.rank() != 2 || x.dim(1) != in_dim()) throw nn::ShapeError("LinearMap::apply_rows", x.shape(), nn::Shape{-1, in_dim()});
  const int64_t n = x.dim(0);
  Tensor64 y({n, out_dim()});
  const Eigen::Map<const RowMat> xm(x.ptr(), n, in_dim());
  const Eigen::Map<const RowMat> am(a.ptr(), in_dim(), out_dim());
  const Eigen::Map<const Eigen::RowVectorXd> bm(b.ptr(), out_dim());
  Eigen::Map<RowMat> ym(y.ptr(), n, out_dim());
  ym = xm * am;
  ym.rowwise() += bm;
  return y;
}

LinearMap fit_linear_map(const Tensor64& x, const Tensor64& y, double ridge) {
  if (x.rank() != 2 || y.rank() != 2 || x.dim(0) != y.dim(0)) throw nn::ShapeError("fit_linear_map", x.shape(), y.shape());
  const int64_t n = x.dim(0);
  const int64_t in = x.dim(1);
  const int64_t out = y.dim(1);
  if (n < in + 1) throw std::invalid_argument("fit_linear_map needs at least " + std::to_string(in + 1) + " samples, got " + std::to_string(n));
  RowMat design(n, in + 1);
  design.leftCols(in) = Eigen::Map<const RowMat>(x.ptr(), n, in);
  design.col(in).setOnes();
  const Eigen::Map<const RowMat> ym(y.ptr(), n, out);
  Eigen::MatrixXd coef;
  if (ridge > 0) {
    Eigen::MatrixXd gram = design.transpose() * design;
    for (int64_t i = 0; i < in; ++i) gram(i, i) += ridge;
    coef = gram.ldlt().solve(design.transpose() * ym);
  } else {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < in + 1) {
      throw std::runtime_error("fit_linear_map: design matrix has rank " + std::to_string(qr.rank()) + " < " +
                               std::to_string(in + 1) + " and no ridge term");
    }
    coef = qr.solve(Eigen::MatrixXd(ym));
  }
  LinearMap m;
  m.ridge = ridge;
  m.a = Tensor64({in, out});
  m.b = Tensor64({out});
  for (int64_t i = 0; i < in; ++i) {
    for (int64_t j = 0; j < out; ++j) m.a[i * out + j] = coef(i, j);
  }
  for (int64_t j = 0; j < out; ++j) m.b[j] = coef(in, j);
  const Eigen::MatrixXd resid = design * coef - ym;
  m.rms_residual = std::sqrt(resid.squaredNorm() / static_cast<double>(n * out));
  if (!std::isfinite(m.rms_residual)) throw nn::NumericalError("fit_linear_map: non-finite solution");
  return m;
}

void store_linear_map(io::Container& c, const std::string& prefix, const LinearMap& m) {
  c.f64[prefix + ".A"] = m.a;
  c.f64[prefix + ".b"] = m.b;
  c.manifest["linear_maps"][prefix] = {{"rms_residual", m.rms_residual}, {"ridge", m.ridge}};
}

LinearMap load_linear_map(const io::Container& c, const std::string& prefix) {
  LinearMap m;
  m.a = c.f64.at(prefix + ".A");
  m.b = c.f64.at(prefix + ".b");
  const auto& meta = c.manifest.at("linear_maps").at(prefix);
  m.rms_residual = meta.at("rms_residual").get<double>();
  m.ridge = meta.at("ridge").get<double>();
  return m;
}

void store_canonical_table(io::Container& c, const CanonicalTable& t) {
  c.f64["canonical.reps"] = t.reps;
  c.manifest["mask_variant"] = mask_variant_name(t.variant);
}

CanonicalTable load_canonical_table(const io::Container& c) {
  CanonicalTable t;
  t.reps = c.f64.at("canonical.reps");
  t.variant = parse_mask_variant(c.manifest.at("mask_variant").get<std::string>());
  return t;
}

void store_training_means(io::Container& c, const TrainingMeans& m) {
  c.f64["means.block_out"] = m.block_out;
  c.f64["means.attn_resid"] = m.attn_resid;
}

TrainingMeans load_training_means(const io::Container& c) {
  return TrainingMeans{c.f64.at("means.block_out"), c.f64.at("means.attn_resid")};
}

}  // namespace axval::interp
