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

#include "axval/axioms/audit.hpp"

#include <algorithm>
#include <any>
#include <cmath>

namespace axval::axioms {

double worst_case_prefix_bound(int i, double eps0) { return std::min(1.0, i * eps0); }

std::vector<PrefixBoundRow> prefix_bound_audit(const AxiomReport& report) {
  std::vector<PrefixBoundRow> rows;
  double sum = 0.0;
  double widths = 0.0;
  double worst = 0.0;
  double keep = 1.0;
  for (int i = 1;; ++i) {
    bool found = false;
    for (const auto& e : report.entries) found = found || (e.axiom == 1 && e.component == i);
    if (!found) break;
    const AxiomEntry& p = report.at(Axiom::kPrefixEquivalence, i);
    const AxiomEntry& c = report.at(Axiom::kComponentEquivalence, i);
    sum += c.epsilon_hat;
    widths += c.epsilon_upper_95 - c.epsilon_hat;
    worst = std::max(worst, c.epsilon_hat);
    keep *= 1.0 - c.epsilon_hat;
    PrefixBoundRow r;
    r.component = i;
    r.prefix_rate = p.epsilon_hat;
    r.component_rate = c.epsilon_hat;
    r.sum_bound = std::min(1.0, sum);
    r.worst_case_bound = worst_case_prefix_bound(i, worst);
    r.independent = 1.0 - keep;
    r.slack = 3.0 * (widths + (p.epsilon_upper_95 - p.epsilon_hat));
    r.exceeds = r.prefix_rate > r.sum_bound + r.slack;
    rows.push_back(r);
  }
  return rows;
}

namespace {

using Ids = std::vector<int64_t>;

struct Flagged {
  std::vector<int64_t> id;
  std::vector<int64_t> value;
  std::vector<uint8_t> bad;
};

uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int64_t step(int64_t v, int j) { return (v * 6364136223846793005LL + j) & 0x7fffffffffffLL; }

Eq flagged_eq(bool compare_values) {
  return [compare_values](const std::any& a, const std::any& b) {
    const auto& x = std::any_cast<const Flagged&>(a);
    const auto& y = std::any_cast<const Flagged&>(b);
    std::vector<bool> out(x.id.size());
    for (size_t s = 0; s < out.size(); ++s) out[s] = x.bad[s] == y.bad[s] && (!compare_values || x.value[s] == y.value[s]);
    return out;
  };
}

Fn identity() {
  return [](const std::any& v) { return v; };
}

Bundle flagged_bundle(int length, double eps0, uint64_t seed) {
  Bundle b;
  auto lift = [](const std::any& v) {
    const auto& ids = std::any_cast<const Ids&>(v);
    return Flagged{ids, ids, std::vector<uint8_t>(ids.size(), 0)};
  };
  for (int j = 1; j <= length; ++j) {
    b.concrete.push_back([j, lift](const std::any& v) -> std::any {
      Flagged f = j == 1 ? lift(v) : std::any_cast<const Flagged&>(v);
      for (auto& x : f.value) x = step(x, j);
      return f;
    });
    b.abstract.push_back([j, lift, eps0, seed](const std::any& v) -> std::any {
      Flagged f = j == 1 ? lift(v) : std::any_cast<const Flagged&>(v);
      for (size_t s = 0; s < f.id.size(); ++s) {
        f.value[s] = step(f.value[s], j);
        const uint64_t h = mix(seed ^ mix(static_cast<uint64_t>(f.id[s]) * 1000003ULL + static_cast<uint64_t>(j)));
        if (eps0 > 0.0 && static_cast<double>(h >> 11) * 0x1.0p-53 < eps0) f.bad[s] = 1;
      }
      return f;
    });
  }
  for (int j = 0; j <= length; ++j) {
    b.alpha.push_back(identity());
    b.gamma.push_back(identity());
    b.abstract_equal.push_back(j == 0 ? Eq([](const std::any& a, const std::any& c) {
      const auto& x = std::any_cast<const Ids&>(a);
      const auto& y = std::any_cast<const Ids&>(c);
      std::vector<bool> out(x.size());
      for (size_t s = 0; s < x.size(); ++s) out[s] = x[s] == y[s];
      return out;
    })
                                      : flagged_eq(true));
    b.equality_mode.push_back("exact");
  }
  b.output_equal = flagged_eq(true);
  return b;
}

}  // namespace

Bundle identity_bundle(int length) { return flagged_bundle(length, 0.0, 0); }

Bundle independent_error_bundle(int length, double eps0, uint64_t seed) { return flagged_bundle(length, eps0, seed); }

std::vector<std::any> id_batches(int64_t n, int64_t batch_size) {
  std::vector<std::any> out;
  for (int64_t b = 0; b < n; b += batch_size) {
    Ids ids;
    for (int64_t s = b; s < std::min(n, b + batch_size); ++s) ids.push_back(s);
    out.emplace_back(std::move(ids));
  }
  return out;
}

}  // namespace axval::axioms
