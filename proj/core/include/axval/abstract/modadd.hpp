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

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace axval::abstract {

constexpr int kModulus = 113;
inline const std::vector<int> kKeyFreqs = {14, 35, 41, 42, 52};

struct CosSin {
  std::vector<double> cos;
  std::vector<double> sin;
  friend bool operator==(const CosSin&, const CosSin&) = default;
};

// Rounds half away from zero to `decimals` places; negative decimals keep full precision.
double round_to(double x, int decimals);

struct ModAddSpec {
  int modulus = kModulus;
  std::vector<int> freqs = kKeyFreqs;
  int decimals = 3;
};

CosSin encode_value(int a, const ModAddSpec& spec);
// d_h[1]
std::pair<CosSin, CosSin> encoding_of_inputs(int a, int b, const ModAddSpec& spec = {});

// Equivalence of second-component outputs, evaluated against downstream behavior.
using CosSinEquivalence = std::function<bool(const CosSin&, const CosSin&)>;

struct AngleSumClass {
  CosSin rep;
  std::shared_ptr<const CosSinEquivalence> equivalence;

  // Falls back to exact equality of representatives without a context.
  bool equivalent(const AngleSumClass& other) const;
};

// d_h[2]
AngleSumClass sum_of_angles(const std::pair<CosSin, CosSin>& encoded,
                            std::shared_ptr<const CosSinEquivalence> equivalence = nullptr);

struct ArgmaxResult {
  int c = 0;
  bool tie = false;
  double score = 0.0;
};

// d_h[3]: argmax over c of sum_k cos(w_k (a + b - c)); smallest c wins ties.
ArgmaxResult difference_of_angles_argmax(const CosSin& angle_sums, const ModAddSpec& spec = {});
int modular_addition(int a, int b, const ModAddSpec& spec = {});

// Both abstract and concrete downstream outputs agree.
CosSinEquivalence downstream_equivalence(std::function<int(const CosSin&)> abstract_suffix,
                                         std::function<int(const CosSin&)> concrete_suffix);

}  // namespace axval::abstract
