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

#include <filesystem>
#include <random>
#include <set>

#include "axval/io/container.hpp"
#include "axval/model/train.hpp"
#include "axval/model/transformer.hpp"
#include "axval/sat/dataset.hpp"
#include "support/reference_model.hpp"

namespace axval {
namespace {

std::vector<int32_t> random_tokens(std::mt19937_64& rng, int64_t count) {
  std::vector<int32_t> out;
  for (int64_t i = 0; i < count; ++i) {
    const auto t = sat::tokenize(sat::random_formula(rng));
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "axval_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(Transformer, ParameterLayout) {
  const auto c = model::twosat_config();
  EXPECT_EQ(c.d_model, 128);
  EXPECT_EQ(c.d_mlp, 512);
  ASSERT_EQ(c.blocks.size(), 2u);
  EXPECT_EQ(c.blocks[0].heads, 1);
  EXPECT_EQ(c.blocks[1].heads, 4);
  EXPECT_EQ(c.context, 41);
  const auto shapes = model::parameter_shapes(c);
  EXPECT_EQ(shapes.front().first, "embed.W_E");
  EXPECT_EQ(shapes.back().first, "unembed.W_U");
  auto ck = model::init_checkpoint(c, 1);
  EXPECT_NO_THROW(model::check_params(c, ck.params));
  ck.params.at("embed.W_E") = nn::Tensor({3, 3});
  EXPECT_THROW(model::check_params(c, ck.params), std::exception);
}

TEST(Transformer, MatchesReferenceForward) {
  std::mt19937_64 rng(4);
  for (const auto& cfg : {model::twosat_config(), model::modadd_config()}) {
    const auto ck = model::init_checkpoint(cfg, 7);
    const model::Decomposition<double> d64(ck);
    const model::Decomposition<float> d32(ck);
    for (int t = 0; t < 3; ++t) {
      std::vector<int32_t> tokens;
      if (cfg.task == "2sat") {
        tokens = random_tokens(rng, 1);
      } else {
        tokens = {static_cast<int32_t>(rng() % 113), static_cast<int32_t>(rng() % 113), 113};
      }
      const auto ref = testing::reference_forward(ck, tokens);
      const auto l64 = d64.forward_logits(tokens, 1);
      const auto l32 = d32.forward_logits(tokens, 1);
      for (int64_t v = 0; v < cfg.vocab; ++v) {
        EXPECT_NEAR(l64[v], ref.logits[static_cast<size_t>(v)], 1e-9);
        EXPECT_NEAR(l32[v], ref.logits[static_cast<size_t>(v)], 1e-4);
      }
    }
  }
}

TEST(Transformer, SplicedSuffixesReproduceForward) {
  std::mt19937_64 rng(5);
  const auto ck = model::init_checkpoint(model::twosat_config(), 3);
  const model::Decomposition<float> d(ck);
  const auto tokens = random_tokens(rng, 6);
  const auto top = d.top_token(d.forward_logits(tokens, 6));
  for (int i = 0; i <= 3; ++i) {
    const auto b = model::run_intermediate(d, tokens, 6, i);
    EXPECT_EQ(model::run_suffix(d, b, i), top) << i;
  }
  EXPECT_THROW(model::run_suffix(d, model::run_intermediate(d, tokens, 6, 1), 2), std::invalid_argument);
  EXPECT_THROW(d.forward_logits(tokens, 5), nn::ShapeError);
}

TEST(Transformer, AttentionTraceRowsAreDistributions) {
  std::mt19937_64 rng(6);
  const auto ck = model::init_checkpoint(model::twosat_config(), 3);
  const model::Decomposition<double> d(ck);
  model::AttentionTrace<double> trace;
  const auto states = d.embed_prefix(random_tokens(rng, 2), 2, nullptr, &trace);
  d.attend_hidden(states, &trace);
  ASSERT_EQ(trace.probs.size(), 2u);
  ASSERT_EQ(trace.probs[1].size(), 4u);
  const auto& p = trace.probs[0][0];
  for (int64_t b = 0; b < 2; ++b) {
    for (int64_t q = 0; q < 41; ++q) {
      double sum = 0.0;
      for (int64_t k = 0; k < 41; ++k) {
        const double v = p[(b * 41 + q) * 41 + k];
        if (k > q) EXPECT_EQ(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Checkpoint, SaveLoadRoundTrip) {
  auto ck = model::init_checkpoint(model::twosat_config(), 9);
  ck.metadata["note"] = "x";
  const auto path = temp_path("ck.axv");
  model::save_checkpoint(ck, path);
  const auto back = model::load_checkpoint(path);
  EXPECT_EQ(back.params, ck.params);
  EXPECT_EQ(back.metadata, ck.metadata);
  const auto again = temp_path("ck2.axv");
  model::save_checkpoint(back, again);
  EXPECT_EQ(io::read_file(path), io::read_file(again));
}

model::TokenData tiny_set(uint64_t seed, int64_t per_label) {
  return model::twosat_tokens(sat::generate_dataset(per_label, seed).samples);
}

TEST(Training, LossDecreasesAndIsDeterministic) {
  const auto data = tiny_set(1, 64);
  model::TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 32;
  cfg.optim.weight_decay = 0.1;
  cfg.eval_every = 0;
  auto run = [&] {
    auto st = model::start_training(model::init_checkpoint(model::twosat_config(), 2), cfg);
    model::train(st, data, {}, cfg);
    return st;
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.checkpoint.params, b.checkpoint.params);
  ASSERT_EQ(a.history.size(), 4u);
  EXPECT_LT(a.history.back().loss, a.history.front().loss);
}

TEST(Training, ResumeMatchesUninterruptedRun) {
  const auto data = tiny_set(2, 32);
  model::TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 16;
  cfg.eval_every = 0;
  auto full = model::start_training(model::init_checkpoint(model::twosat_config(), 5), cfg);
  model::train(full, data, {}, cfg);
  model::TrainConfig one = cfg;
  one.epochs = 1;
  auto half = model::start_training(model::init_checkpoint(model::twosat_config(), 5), one);
  model::train(half, data, {}, one);
  const auto path = temp_path("state.axv");
  model::save_train_state(half, path);
  auto resumed = model::load_train_state(path);
  model::train(resumed, data, {}, cfg);
  EXPECT_EQ(resumed.epochs_done, 2);
  EXPECT_EQ(resumed.checkpoint.params, full.checkpoint.params);
}

TEST(Training, ModAddSplitPartitionsPairs) {
  const auto [tr, te] = model::modadd_split(113, 0.3, 4);
  EXPECT_EQ(tr.count + te.count, 113 * 113);
  EXPECT_EQ(tr.count, static_cast<int64_t>(std::llround(0.3 * 113 * 113)));
  std::set<std::pair<int, int>> seen;
  for (const auto* d : {&tr, &te}) {
    for (int64_t i = 0; i < d->count; ++i) {
      const int a = d->tokens[static_cast<size_t>(3 * i)];
      const int b = d->tokens[static_cast<size_t>(3 * i + 1)];
      EXPECT_TRUE(seen.insert({a, b}).second);
      EXPECT_EQ(d->targets[static_cast<size_t>(i)], (a + b) % 113);
    }
  }
}

}  // namespace
}  // namespace axval
