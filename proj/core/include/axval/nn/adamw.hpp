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
#include <map>
#include <string>

#include "axval/nn/tensor.hpp"

namespace axval::nn {

using ParamStore = std::map<std::string, Tensor>;

struct AdamWConfig {
  double lr = 1e-3;
  double weight_decay = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamWState {
  AdamWConfig config;
  int64_t step = 0;
  ParamStore m;
  ParamStore v;
};

AdamWState adamw_init(const ParamStore& params, const AdamWConfig& config);

// Decoupled decay first (p *= 1 - lr * wd), then the bias-corrected Adam
// update. Throws NumericalError naming the parameter on a non-finite gradient.
void adamw_step(ParamStore& params, const ParamStore& grads, AdamWState& state);

}  // namespace axval::nn
