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

#include <any>
#include <cstdint>
#include <vector>

#include "axval/abstract/twosat.hpp"
#include "axval/axioms/engine.hpp"
#include "axval/interp/operators.hpp"
#include "axval/model/train.hpp"

namespace axval::pipeline {

struct TokenBatch {
  std::vector<int32_t> tokens;
  int64_t batch = 0;
};

std::vector<std::any> token_batches(const model::TokenData& data, int64_t batch_size, int64_t limit = 0);

struct TwoSatBundleOptions {
  bool order_sensitive = false;
  // Probability that d_h[1] replaces a parsed clause by a uniformly drawn ordered clause.
  double noise_rate = 0.0;
  uint64_t noise_seed = 0;
};

// Replacement draws depend only on the seed and the formula tokens.
abstract::ClauseList noisy_parse(std::span<const int32_t> tokens, double rate, uint64_t seed);

// d_t[3] reports SAT when the top logit is SAT and UNSAT otherwise.
// The model, operators and interpretations must outlive the bundle. The
// interpretation neuron ids must equal ops.evaluating.
axioms::Bundle twosat_bundle(const model::Decomposition<float>& model, const interp::TwoSatOperators& ops,
                             const std::vector<abstract::NeuronInterpretation>& interps,
                             const TwoSatBundleOptions& options = {});

}  // namespace axval::pipeline
