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

#include "axval/abstract/modadd.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace axval::abstract {

double round_to(double x, int decimals) {
  if (decimals < 0) return x;
  const double scale = std::pow(10.0, decimals);
  double r = std::round(x * scale) / scale;
  if (r == 0.0) r = 0.0;  // drop negative zero
  return r;
}

CosSin encode_value(int a, const ModAddSpec& spec) {
  if (a < 0 || a >= spec.modulus) {
    throw std::out_of_range("input " + std::to_string(a) + " outside Z_" + std::to_string(spec.modulus));
  }
  CosSin out;
  for (const int k : spec.freqs) {
    const double w = 2.0 * std::numbers::pi * k / spec.modulus;
    out.cos.push_back(round_to(std::cos(w * a), spec.decimals));
    out.sin.push_back(round_to(std::sin(w * a), spec.decimals));
  }
  return out;
}

std::pair<CosSin, CosSin> encoding_of_inputs(int a, int b, const ModAddSpec& spec) {
  return {encode_value(a, spec), encode_value(b, spec)};
}

bool AngleSumClass::equivalent(const AngleSumClass& other) const {
  if (equivalence) return (*equivalence)(rep, other.rep);
  return rep == other.rep;
}

AngleSumClass sum_of_angles(const std::pair<CosSin, CosSin>& encoded, std::shared_ptr<const CosSinEquivalence> equivalence) {
  const auto& [x, y] = encoded;
  if (x.cos.size() != x.sin.size() || y.cos.size() != x.cos.size() || y.sin.size() != x.cos.size()) {
    throw std::invalid_argument("sum_of_angles: mismatched frequency counts");
  }
  AngleSumClass out;
  for (size_t k = 0; k < x.cos.size(); ++k) {
    out.rep.cos.push_back(x.cos[k] * y.cos[k] - x.sin[k] * y.sin[k]);
    out.rep.sin.push_back(x.sin[k] * y.cos[k] + x.cos[k] * y.sin[k]);
  }
  out.equivalence = std::move(equivalence);
  return out;
}

ArgmaxResult difference_of_angles_argmax(const CosSin& s, const ModAddSpec& spec) {
  if (s.cos.size() != spec.freqs.size() || s.sin.size() != spec.freqs.size()) {
    throw std::invalid_argument("difference_of_angles_argmax: expected " + std::to_string(spec.freqs.size()) + " frequencies");
  }
  ArgmaxResult best;
  best.score = -std::numeric_limits<double>::infinity();
  std::vector<double> scores(static_cast<size_t>(spec.modulus));
  for (int c = 0; c < spec.modulus; ++c) {
    double total = 0.0;
    for (size_t k = 0; k < spec.freqs.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * spec.freqs[k] / spec.modulus;
      total += s.cos[k] * std::cos(w * c) + s.sin[k] * std::sin(w * c);
    }
    scores[static_cast<size_t>(c)] = total;
    if (total > best.score) {
      best.score = total;
      best.c = c;
    }
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(best.score));
  for (int c = 0; c < spec.modulus; ++c) {
    if (c != best.c && std::abs(scores[static_cast<size_t>(c)] - best.score) <= tol) best.tie = true;
  }
  return best;
}

int modular_addition(int a, int b, const ModAddSpec& spec) {
  return difference_of_angles_argmax(sum_of_angles(encoding_of_inputs(a, b, spec)).rep, spec).c;
}

CosSinEquivalence downstream_equivalence(std::function<int(const CosSin&)> abstract_suffix,
                                         std::function<int(const CosSin&)> concrete_suffix) {
  return [abstract_suffix = std::move(abstract_suffix), concrete_suffix = std::move(concrete_suffix)](const CosSin& a,
                                                                                                    const CosSin& b) {
    return abstract_suffix(a) == abstract_suffix(b) && concrete_suffix(a) == concrete_suffix(b);
  };
}

}  // namespace axval::abstract
