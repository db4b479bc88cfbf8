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

#include <vector>

#include "axval/abstract/modadd.hpp"
#include "axval/axioms/engine.hpp"
#include "axval/interp/operators.hpp"
#include "axval/model/train.hpp"

namespace axval::pipeline {

struct ModAddOperators {
  abstract::ModAddSpec spec;
  interp::LinearMap alpha_1;  // input-token states [2d] -> (cos a, sin a, cos b, sin b)
  interp::LinearMap gamma_1;  // encodings -> all states [3d]
  interp::LinearMap alpha_2;  // (resid, hidden) [d + n] -> (cos ab, sin ab)
  interp::LinearMap gamma_2;  // angle sums -> (resid, hidden)
};

// Frequencies k in [1, P/2] with the largest embedding Fourier norm, ascending.
std::vector<int> auto_key_freqs(const model::Checkpoint& ck, int count = 5);

ModAddOperators fit_modadd_operators(const model::Decomposition<double>& d, const model::TokenData& train,
                                     const abstract::ModAddSpec& spec, double ridge);

void store_modadd_operators(io::Container& c, const ModAddOperators& ops);
ModAddOperators load_modadd_operators(const io::Container& c);

// Batches are TokenBatch values; the model and operators must outlive the bundle.
axioms::Bundle modadd_bundle(const model::Decomposition<double>& d, const ModAddOperators& ops);

}  // namespace axval::pipeline
