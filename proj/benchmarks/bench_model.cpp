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

#include <benchmark/benchmark.h>

#include <random>

#include "axval/model/train.hpp"
#include "axval/model/transformer.hpp"
#include "axval/sat/dataset.hpp"

namespace {

std::vector<int32_t> formulas(int64_t n) {
  std::mt19937_64 rng(3);
  std::vector<int32_t> out;
  for (int64_t i = 0; i < n; ++i) {
    const auto t = axval::sat::tokenize(axval::sat::random_formula(rng));
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

void BM_Forward(benchmark::State& state) {
  const auto ck = axval::model::init_checkpoint(axval::model::twosat_config(), 1);
  const axval::model::Decomposition<float> d(ck);
  const int64_t batch = state.range(0);
  const auto tokens = formulas(batch);
  for (auto _ : state) benchmark::DoNotOptimize(d.forward_logits(tokens, batch));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::vector<axval::sat::Sample> samples;
  for (int i = 0; i < 512; ++i) {
    const auto f = axval::sat::random_formula(rng);
    samples.push_back({f, axval::sat::scc_sat(f)});
  }
  const auto data = axval::model::twosat_tokens(samples);
  axval::model::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 256;
  cfg.eval_every = 0;
  for (auto _ : state) {
    auto st = axval::model::start_training(axval::model::init_checkpoint(axval::model::twosat_config(), 1), cfg);
    axval::model::train(st, data, {}, cfg);
    benchmark::DoNotOptimize(st.checkpoint.params.size());
  }
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
