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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "axval/interp/operators.hpp"
#include "axval/model/transformer.hpp"
#include "axval/sat/formula.hpp"

namespace axval::analysis {

using nn::Tensor;
using nn::Tensor64;

// Pre-softmax score of a first-block head split by embedding source:
// score(dst, src) = tt[td, ts] + tp[td, ps] + pt[pd, ts] + pp[pd, ps]
// where t* are token ids and p* positions of the destination and source.
struct QKDecomposition {
  Tensor64 tt;  // [V, V]
  Tensor64 tp;  // [V, S]
  Tensor64 pt;  // [S, V]
  Tensor64 pp;  // [S, S]

  double score(int32_t dst_tok, int64_t dst_pos, int32_t src_tok, int64_t src_pos) const;
};

// Block 0 only: its inputs are the embeddings themselves.
QKDecomposition qk_decompose(const model::Checkpoint& ck, int head);

// Tokens that can occur at a 2-SAT position.
std::vector<int32_t> position_tokens(int64_t pos);

// Softmax of expected scores for destination 4i+2 with literals uniform and
// independent; entries past the destination are 0. Also returns the expected
// pre-softmax scores.
struct ExpectedAttention {
  std::vector<double> scores;
  std::vector<double> probs;
};
ExpectedAttention expected_attention(const QKDecomposition& qk, int clause);

struct ClauseWorstCase {
  double first_literal_min = 0.0;
  double clause_min = 0.0;
};
// Lower bounds on the attention that 4i+2 pays to 4i+1 and to {4i+1, 4i+2}.
ClauseWorstCase worstcase_attention(const QKDecomposition& qk, int clause);
// Bounds on the attention ':' pays to any single position.
std::pair<double, double> worstcase_colon(const QKDecomposition& qk);

// W_out[n] . W_U[:, SAT] of the last block.
std::vector<double> neuron_output_coefficients(const model::Checkpoint& ck);
double unembed_negation_gap(const model::Checkpoint& ck);

struct SparsityResult {
  std::vector<int> above_threshold;  // coefficient > threshold
  std::vector<int> evaluating;       // above_threshold with mean activation >= floor
  std::vector<double> mean_activation;
};
SparsityResult sparsity_scan(const std::vector<double>& coefficients, const Tensor& hidden, double threshold = 1e-6,
                             double activity_floor = 0.01);

// Post-ReLU hidden activations of the last block at the readout: [N, n].
Tensor collect_hidden(const model::Decomposition<float>& d, const std::vector<int32_t>& tokens, int64_t count,
                      int64_t chunk = 512);

// 34 conditions: SAT, UNSAT, then phi[a] for a = 0..31.
constexpr int kProfileConditions = 2 + sat::kAssignments;
std::string profile_condition_name(int condition);

struct ActivationProfiles {
  int64_t neurons = 0;
  std::vector<int64_t> counts;                            // per condition
  std::vector<std::vector<std::optional<double>>> means;  // [condition][neuron]
};
ActivationProfiles activation_profiles(const Tensor& hidden, const std::vector<sat::FeatureProfile>& profiles);
// Columns: neuron,condition,count,mean (empty when the bucket is empty).
std::string profiles_csv(const ActivationProfiles& p, const std::vector<int>& neurons);

// Readout preactivation of last-block hidden neurons as a function of clause
// counts, on first-block outputs produced by gamma_1.
class PreactivationModel {
 public:
  PreactivationModel(const model::Decomposition<double>& d, const interp::TwoSatOperators& ops);

  int heads() const { return heads_; }
  // w^h: pre-softmax readout score on each ordered clause, [heads][100].
  const std::vector<std::vector<double>>& clause_scores() const { return clause_scores_; }

  // counts: per ordered clause index. With background, the fixed positions
  // (punctuation, first literals, readout) enter each head's softmax.
  double preactivation(int neuron, const std::vector<double>& counts, bool background = true) const;

 private:
  int heads_ = 0;
  int64_t d_mlp_ = 0;
  std::vector<double> c_;                                // [n]
  std::vector<std::vector<double>> clause_scores_;       // [h][100]
  std::vector<double> score_shift_;                      // [h]
  std::vector<std::vector<double>> d_;                   // [h][100]
  std::vector<std::vector<std::vector<double>>> cvals_;  // [h][100][n]
  std::vector<double> bg_d_;                             // [h]
  std::vector<std::vector<double>> bg_c_;                // [h][n]
};

std::vector<double> clause_counts(const abstract::ClauseList& clauses);
// Columns: head,left,right,score.
std::string clause_preferences_csv(const PreactivationModel& m);

}  // namespace axval::analysis
