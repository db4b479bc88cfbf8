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

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "axval/abstract/twosat.hpp"
#include "axval/io/container.hpp"
#include "axval/model/transformer.hpp"

namespace axval::interp {

enum class MaskVariant { kProse, kListing };

MaskVariant parse_mask_variant(const std::string& s);
std::string mask_variant_name(MaskVariant v);

// Block-0 mask for the canonical table: query 4i+2 reads the literals of
// clause i (prose) or the clause with its opening parenthesis (listing);
// other rows stay causal.
std::shared_ptr<const nn::AttentionMask> canonical_mask(MaskVariant v);

// Rows indexed by Clause::index(): [100, d].
struct CanonicalTable {
  MaskVariant variant = MaskVariant::kProse;
  nn::Tensor64 reps;

  const double* rep(int clause) const { return reps.ptr() + static_cast<int64_t>(clause) * reps.dim(1); }
};

// Throws if a canonical representation is not its own nearest neighbor.
CanonicalTable build_canonical_table(const model::Decomposition<double>& d, MaskVariant v);

struct MatchResult {
  int clause = 0;
  bool tie = false;
  double cosine = 0.0;
};

// Highest cosine similarity, lowest clause index on ties.
MatchResult nearest_clause(const CanonicalTable& table, const float* v, int64_t dim);
MatchResult nearest_clause(const CanonicalTable& table, const double* v, int64_t dim);

// Per-position mean of block-0 outputs [S, d] and the mean readout residual [d]
// after the last attention layer.
struct TrainingMeans {
  nn::Tensor64 block_out;
  nn::Tensor64 attn_resid;
};

TrainingMeans compute_training_means(const model::Decomposition<float>& d, const std::vector<int32_t>& tokens,
                                     int64_t count, int64_t chunk = 512);

struct TwoSatOperators {
  CanonicalTable table;
  TrainingMeans means;
  std::vector<int> evaluating;  // hidden neuron ids, in interpretation order
  double threshold = 0.5;
  double high_activation = 2.0;
  mutable int64_t alpha1_ties = 0;

  // states [B, S, d] -> clause lists read at positions 4i+2.
  std::vector<abstract::ClauseList> alpha_1(const nn::Tensor& states) const;
  template <typename T>
  nn::BasicTensor<T> gamma_1(const std::vector<abstract::ClauseList>& clauses) const;

  std::vector<abstract::Activations> alpha_2(const nn::Tensor& hidden) const;
  template <typename T>
  std::pair<nn::BasicTensor<T>, nn::BasicTensor<T>> gamma_2(const std::vector<abstract::Activations>& acts,
                                                              int64_t d_mlp) const;
};

// Affine map y = x A + b fitted by least squares.
struct LinearMap {
  nn::Tensor64 a;  // [in, out]
  nn::Tensor64 b;  // [out]
  double rms_residual = 0.0;
  double ridge = 0.0;

  int64_t in_dim() const { return a.dim(0); }
  int64_t out_dim() const { return a.dim(1); }
  std::vector<double> apply(const double* x) const;
  nn::Tensor64 apply_rows(const nn::Tensor64& x) const;
};

// x [N, in], y [N, out]. With ridge = 0 a rank-deficient design is an error.
LinearMap fit_linear_map(const nn::Tensor64& x, const nn::Tensor64& y, double ridge = 1e-6);

void store_linear_map(io::Container& c, const std::string& prefix, const LinearMap& m);
LinearMap load_linear_map(const io::Container& c, const std::string& prefix);
void store_canonical_table(io::Container& c, const CanonicalTable& t);
CanonicalTable load_canonical_table(const io::Container& c);
void store_training_means(io::Container& c, const TrainingMeans& m);
TrainingMeans load_training_means(const io::Container& c);

}  // namespace axval::interp
