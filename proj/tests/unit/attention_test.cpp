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

#include "axval/abstract/twosat.hpp"
#include "axval/analysis/attention.hpp"
#include "axval/interp/operators.hpp"
#include "axval/model/transformer.hpp"
#include "axval/sat/dataset.hpp"
#include "support/reference_model.hpp"

namespace axval {
namespace {

const model::Checkpoint& checkpoint() {
  static const auto ck = model::init_checkpoint(model::twosat_config(), 21);
  return ck;
}

std::vector<int32_t> random_batch(uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<int32_t> out;
  for (int i = 0; i < count; ++i) {
    const auto t = sat::tokenize(sat::random_formula(rng));
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

TEST(QKDecomposition, MatchesReferenceScores) {
  const auto qk = analysis::qk_decompose(checkpoint(), 0);
  const auto tokens = random_batch(1, 5);
  for (int f = 0; f < 5; ++f) {
    const std::vector<int32_t> one(tokens.begin() + f * 41, tokens.begin() + (f + 1) * 41);
    const auto ref = testing::reference_forward(checkpoint(), one);
    for (int q = 0; q < 41; ++q) {
      for (int k = 0; k <= q; ++k) {
        EXPECT_NEAR(qk.score(one[q], q, one[k], k), ref.scores0[0][q][k], 1e-10);
      }
    }
  }
  EXPECT_THROW(analysis::qk_decompose(checkpoint(), 1), std::out_of_range);
}

TEST(ExpectedAttention, RowsSumToOneAndMatchSampledScores) {
  const auto qk = analysis::qk_decompose(checkpoint(), 0);
  const int n = 4000;
  const auto tokens = random_batch(2, n);
  for (int c : {0, 4, 9}) {
    const auto e = analysis::expected_attention(qk, c);
    const int dst = 4 * c + 2;
    double sum = 0.0;
    for (int p = 0; p < 41; ++p) {
      sum += e.probs[static_cast<size_t>(p)];
      if (p > dst) EXPECT_EQ(e.probs[static_cast<size_t>(p)], 0.0);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    // Monte Carlo estimate of each expected score.
    for (int p = 0; p <= dst; ++p) {
      double m = 0.0;
      double m2 = 0.0;
      for (int f = 0; f < n; ++f) {
        const double s = qk.score(tokens[static_cast<size_t>(f * 41 + dst)], dst, tokens[static_cast<size_t>(f * 41 + p)], p);
        m += s;
        m2 += s * s;
      }
      m /= n;
      const double sd = std::sqrt(std::max(0.0, m2 / n - m * m) / n);
      EXPECT_NEAR(e.scores[static_cast<size_t>(p)], m, 5 * sd + 1e-12) << c << "," << p;
    }
  }
}

TEST(WorstCaseAttention, BoundsHoldOnSampledFormulas) {
  const auto& ck = checkpoint();
  const auto qk = analysis::qk_decompose(ck, 0);
  const model::Decomposition<double> d(ck);
  const int n = 200;
  const auto tokens = random_batch(3, n);
  model::AttentionTrace<double> trace;
  d.embed_prefix(tokens, n, nullptr, &trace);
  const auto& p = trace.probs[0][0];
  const auto [lo, hi] = analysis::worstcase_colon(qk);
  for (int c = 0; c < 10; ++c) {
    const auto w = analysis::worstcase_attention(qk, c);
    const int dst = 4 * c + 2;
    for (int f = 0; f < n; ++f) {
      const double* row = p.ptr() + (static_cast<int64_t>(f) * 41 + dst) * 41;
      EXPECT_GE(row[dst - 1] + 1e-12, w.first_literal_min);
      EXPECT_GE(row[dst - 1] + row[dst] + 1e-12, w.clause_min);
    }
  }
  for (int f = 0; f < n; ++f) {
    const double* row = p.ptr() + (static_cast<int64_t>(f) * 41 + 40) * 41;
    for (int k = 0; k < 41; ++k) {
      EXPECT_GE(row[k] + 1e-12, lo);
      EXPECT_LE(row[k], hi + 1e-12);
    }
  }
}

TEST(NeuronCoefficients, EqualOutputWeightsDotSatDirection) {
  const auto& ck = checkpoint();
  const auto c = analysis::neuron_output_coefficients(ck);
  const auto& wout = ck.params.at("blocks.1.mlp.W_out");
  const auto& wu = ck.params.at("unembed.W_U");
  ASSERT_EQ(c.size(), 512u);
  for (int n : {0, 100, 511}) {
    double s = 0.0;
    for (int64_t k = 0; k < 128; ++k) s += static_cast<double>(wout.at(n, k)) * wu.at(k, sat::kSat);
    EXPECT_NEAR(c[static_cast<size_t>(n)], s, 1e-12);
  }
}

TEST(Sparsity, SelectsPositiveActiveNeurons) {
  nn::Tensor hidden({2, 4});
  const float rows[8] = {1.0f, 1.0f, 0.0f, 0.3f, 0.0f, 1.0f, 0.002f, 0.1f};
  std::copy(rows, rows + 8, hidden.ptr());
  const auto r = analysis::sparsity_scan({1.0, -1.0, 2.0, 0.5}, hidden);
  EXPECT_EQ(r.above_threshold, (std::vector<int>{0, 2, 3}));
  EXPECT_EQ(r.evaluating, (std::vector<int>{0, 3}));
  EXPECT_NEAR(r.mean_activation[3], 0.2, 1e-7);
}

TEST(ActivationProfiles, SyntheticNeuronLandsInItsBucket) {
  std::mt19937_64 rng(5);
  const uint32_t target = sat::assignment_from_pattern("TFFFF");
  std::vector<sat::FeatureProfile> profiles;
  const int n = 3000;
  nn::Tensor hidden({n, 2});
  for (int i = 0; i < n; ++i) {
    const auto f = sat::random_formula(rng);
    const auto prof = sat::brute_force_profile(f);
    profiles.push_back(prof);
    hidden[2 * i] = ((prof >> target) & 1u) != 0 ? 1.5f : 0.0f;
    hidden[2 * i + 1] = prof != 0 ? 1.0f : 0.0f;
  }
  const auto p = analysis::activation_profiles(hidden, profiles);
  ASSERT_TRUE(p.means[static_cast<size_t>(2 + target)][0].has_value());
  EXPECT_DOUBLE_EQ(*p.means[static_cast<size_t>(2 + target)][0], 1.5);
  EXPECT_DOUBLE_EQ(*p.means[0][1], 1.0);
  EXPECT_DOUBLE_EQ(*p.means[1][1], 0.0);
  EXPECT_EQ(p.counts[0] + p.counts[1], n);
  EXPECT_EQ(analysis::profile_condition_name(2 + static_cast<int>(target)), "phi[TFFFF]");
}

TEST(PreactivationModel, MatchesConcretePreactivationOnGamma1States) {
  const auto& ck = checkpoint();
  const model::Decomposition<double> d64(ck);
  const model::Decomposition<float> d32(ck);
  interp::TwoSatOperators ops;
  ops.table = interp::build_canonical_table(d64, interp::MaskVariant::kProse);
  ops.means = interp::compute_training_means(d32, random_batch(6, 64), 64);
  const analysis::PreactivationModel pm(d64, ops);
  EXPECT_EQ(pm.heads(), 4);
  std::mt19937_64 rng(7);
  std::vector<abstract::ClauseList> lists;
  for (int i = 0; i < 20; ++i) {
    const auto f = sat::random_formula(rng);
    lists.emplace_back(f.begin(), f.end());
  }
  const auto states = ops.gamma_1<double>(lists);
  const auto [resid, hidden] = d64.attend_hidden(states);
  const auto& win = ck.params.at("blocks.1.mlp.W_in");
  const auto& bin = ck.params.at("blocks.1.mlp.b_in");
  for (size_t i = 0; i < lists.size(); ++i) {
    const auto counts = analysis::clause_counts(lists[i]);
    for (int n : {0, 7, 300}) {
      double pre = bin[n];
      for (int64_t k = 0; k < 128; ++k) pre += resid[static_cast<int64_t>(i) * 128 + k] * win.at(k, n);
      EXPECT_NEAR(pm.preactivation(n, counts), pre, 1e-9);
    }
  }
}

}  // namespace
}  // namespace axval
