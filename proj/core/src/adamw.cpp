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

#include "axval/nn/adamw.hpp"

#include <cmath>

namespace axval::nn {

AdamWState adamw_init(const ParamStore& params, const AdamWConfig& config) {
  AdamWState s;
  s.config = config;
  for (const auto& [name, p] : params) {
    s.m.emplace(name, Tensor(p.shape()));
    s.v.emplace(name, Tensor(p.shape()));
  }
  return s;
}

void adamw_step(ParamStore& params, const ParamStore& grads, AdamWState& state) {
  for (const auto& [name, p] : params) {
    const auto it = grads.find(name);
    if (it == grads.end()) throw ShapeError("adamw", "missing gradient for parameter " + name);
    if (it->second.shape() != p.shape()) throw ShapeError("adamw " + name, p.shape(), it->second.shape());
    if (!it->second.all_finite()) throw NumericalError("adamw: non-finite gradient for parameter " + name);
    if (state.m.at(name).shape() != p.shape()) throw ShapeError("adamw state " + name, p.shape(), state.m.at(name).shape());
  }
  const AdamWConfig& c = state.config;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const auto decay = static_cast<float>(1.0 - c.lr * c.weight_decay);
  const auto b1 = static_cast<float>(c.beta1);
  const auto b2 = static_cast<float>(c.beta2);
  const auto step_size = static_cast<float>(c.lr / bc1);
  const auto inv_sqrt_bc2 = static_cast<float>(1.0 / std::sqrt(bc2));
  const auto eps = static_cast<float>(c.eps);
  for (auto& [name, p] : params) {
    const Tensor& g = grads.at(name);
    Tensor& m = state.m.at(name);
    Tensor& v = state.v.at(name);
    for (int64_t i = 0; i < p.numel(); ++i) {
      p[i] *= decay;
      m[i] = b1 * m[i] + (1.0f - b1) * g[i];
      v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
      p[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_sqrt_bc2 + eps);
    }
    if (!p.all_finite()) throw NumericalError("adamw: parameter " + name + " became non-finite");
  }
}

}  // namespace axval::nn
