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

#include "axval/nn/gemm.hpp"

#include <Eigen/Core>

namespace axval::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using MutMap = Eigen::Map<RowMat<T>>;

template <typename T, typename L, typename R>
void assign(MutMap<T>& out, const L& lhs, const R& rhs, T alpha, T beta) {
  if (beta == T(0)) {
    out.noalias() = alpha * (lhs * rhs);
  } else {
    if (beta != T(1)) out *= beta;
    out.noalias() += alpha * (lhs * rhs);
  }
}

}  // namespace

template <typename T>
void gemm(bool trans_a, bool trans_b, int64_t m, int64_t n, int64_t k, T alpha, const T* a,
          const T* b, T beta, T* c) {
  MutMap<T> out(c, m, n);
  if (m == 0 || n == 0) return;
  if (k == 0) {
    if (beta == T(0)) out.setZero(); else out *= beta;
    return;
  }
  if (!trans_a && !trans_b) {
    assign(out, ConstMap<T>(a, m, k), ConstMap<T>(b, k, n), alpha, beta);
  } else if (!trans_a && trans_b) {
    assign(out, ConstMap<T>(a, m, k), ConstMap<T>(b, n, k).transpose(), alpha, beta);
  } else if (trans_a && !trans_b) {
    assign(out, ConstMap<T>(a, k, m).transpose(), ConstMap<T>(b, k, n), alpha, beta);
  } else {
    assign(out, ConstMap<T>(a, k, m).transpose(), ConstMap<T>(b, n, k).transpose(), alpha, beta);
  }
}

template void gemm<float>(bool, bool, int64_t, int64_t, int64_t, float, const float*, const float*,
                          float, float*);
template void gemm<double>(bool, bool, int64_t, int64_t, int64_t, double, const double*,
                           const double*, double, double*);

}  // namespace axval::nn
