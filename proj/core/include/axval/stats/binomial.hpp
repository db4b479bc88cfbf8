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

namespace axval::stats {

// P[X <= k] for X ~ Binomial(n, p).
double binom_cdf(int64_t k, int64_t n, double p);

// One-sided upper Clopper-Pearson bound: smallest p with P[X <= k; n, p] <= 1 - confidence.
double clopper_pearson_upper(int64_t k, int64_t n, double confidence = 0.95);
// Same bound by bisection only (no closed forms), for cross-checking.
double clopper_pearson_upper_bisect(int64_t k, int64_t n, double confidence = 0.95);

}  // namespace axval::stats
