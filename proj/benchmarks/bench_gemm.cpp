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
#include <vector>

#include "axval/nn/gemm.hpp"

namespace {

template <typename T>
void BM_Gemm(benchmark::State& state) {
  const int64_t m = state.range(0);
  const int64_t n = state.range(1);
  const int64_t k = state.range(2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<T> u(-1, 1);
  std::vector<T> a(static_cast<size_t>(m * k));
  std::vector<T> b(static_cast<size_t>(k * n));
  std::vector<T> c(static_cast<size_t>(m * n));
  for (auto& x : a) x = u(rng);
  for (auto& x : b) x = u(rng);
  for (auto _ : state) {
    axval::nn::gemm<T>(false, false, m, n, k, T(1), a.data(), b.data(), T(0), c.data());
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["GFLOP/s"] = benchmark::Counter(2.0 * static_cast<double>(m * n * k), benchmark::Counter::kIsIterationInvariantRate,
                                                 benchmark::Counter::OneK::kIs1000);
}

// Block-level shapes: [batch*41, 128] x [128, 128] and the MLP projection.
BENCHMARK_TEMPLATE(BM_Gemm, float)->Args({41 * 64, 128, 128})->Args({41 * 64, 512, 128})->Args({256, 128, 512});
BENCHMARK_TEMPLATE(BM_Gemm, double)->Args({41 * 64, 128, 128})->Args({256, 128, 512});

}  // namespace
