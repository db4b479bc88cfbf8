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

#include "axval/stats/binomial.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace axval::stats {

namespace {

void check(int64_t k, int64_t n, double confidence) {
  if (n < 1) throw std::invalid_argument("clopper_pearson: n must be >= 1, got " + std::to_string(n));
  if (k < 0 || k > n) throw std::invalid_argument("clopper_pearson: k=" + std::to_string(k) + " outside [0, n]");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("clopper_pearson: confidence outside (0, 1)");
}

}  // namespace

double binom_cdf(int64_t k, int64_t n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  // P[X <= k] = I_{1-p}(n - k, k + 1)
  return boost::math::ibeta(static_cast<double>(n - k), static_cast<double>(k + 1), 1.0 - p);
}

double clopper_pearson_upper_bisect(int64_t k, int64_t n, double confidence) {
  check(k, n, confidence);
  if (k == n) return 1.0;
  const double tail = 1.0 - confidence;
  double lo = 0.0;
  double hi = 1.0;
  // binom_cdf is decreasing in p.
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binom_cdf(k, n, mid) <= tail) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double clopper_pearson_upper(int64_t k, int64_t n, double confidence) {
  check(k, n, confidence);
  if (k == n) return 1.0;
  if (k == 0) return 1.0 - std::pow(1.0 - confidence, 1.0 / static_cast<double>(n));
  return clopper_pearson_upper_bisect(k, n, confidence);
}

}  // namespace axval::stats
