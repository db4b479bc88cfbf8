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

#include "axval/abstract/twosat.hpp"
#include "axval/sat/dataset.hpp"
#include "axval/stats/binomial.hpp"

namespace {

void BM_SccSolver(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<axval::sat::Formula> fs;
  for (int i = 0; i < 1024; ++i) fs.push_back(axval::sat::random_formula(rng));
  size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(axval::sat::scc_sat(fs[i++ & 1023]));
}
BENCHMARK(BM_SccSolver);

void BM_BruteForceProfile(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<axval::sat::Formula> fs;
  for (int i = 0; i < 1024; ++i) fs.push_back(axval::sat::random_formula(rng));
  size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(axval::sat::brute_force_profile(fs[i++ & 1023]));
}
BENCHMARK(BM_BruteForceProfile);

// Completeness sweep over interpretation sets covering k of the 32 atoms.
void BM_CompletenessSweep(benchmark::State& state) {
  auto interps = axval::abstract::ideal_interpretations();
  interps.resize(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(axval::abstract::completeness_check(interps));
}
BENCHMARK(BM_CompletenessSweep)->Arg(8)->Arg(31)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_ClopperPearson(benchmark::State& state) {
  int64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(axval::stats::clopper_pearson_upper(k++ % 50, 80000));
}
BENCHMARK(BM_ClopperPearson);

}  // namespace
