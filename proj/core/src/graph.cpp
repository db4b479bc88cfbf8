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

#include "axval/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axval/nn/gemm.hpp"

namespace axval::nn {

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (const int64_t d : shape) {
    if (d < 0) throw ShapeError("shape", "negative dimension in " + shape_str(shape));
    n *= d;
  }
  return n;
}

ShapeError::ShapeError(const std::string& op, const Shape& lhs, const Shape& rhs)
    : std::runtime_error(op + ": incompatible shapes " + shape_str(lhs) + " and " + shape_str(rhs)) {}

ShapeError::ShapeError(const std::string& op, const std::string& detail)
    : std::runtime_error(op + ": " + detail) {}

AttentionMask AttentionMask::causal(int64_t n) {
  AttentionMask m{n, n, std::vector<uint8_t>(static_cast<size_t>(n * n), 0)};
  for (int64_t q = 0; q < n; ++q) {
    for (int64_t k = 0; k <= q; ++k) m.allow[static_cast<size_t>(q * n + k)] = 1;
  }
  return m;
}

namespace {

Shape suffix(const Shape& s, size_t from) { return Shape(s.begin() + static_cast<long>(from), s.end()); }

int64_t norm_axis(int64_t axis, int64_t rank, const char* op) {
  const int64_t a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank) {
    throw ShapeError(op, "axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank));
  }
  return a;
}

}  // namespace

template <typename T>
Var Graph<T>::push(const char* op, TensorT value, bool requires_grad, std::function<void(Graph&)> back) {
  if (!value.all_finite()) {
    throw NumericalError(std::string(op) + ": non-finite value in result of shape " + shape_str(value.shape()));
  }
  Node n;
  n.value = std::move(value);
  n.requires_grad = record_ && requires_grad;
  if (n.requires_grad) n.backward = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

template <typename T>
typename Graph<T>::TensorT& Graph<T>::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.numel() != n.value.numel() || n.grad.shape() != n.value.shape()) {
    n.grad = TensorT(n.value.shape());
  }
  return n.grad;
}

template <typename T>
typename Graph<T>::TensorT Graph<T>::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.shape() != n.value.shape() || n.grad.numel() != n.value.numel()) return TensorT(n.value.shape());
  return n.grad;
}

template <typename T>
Var Graph<T>::leaf(TensorT value, bool requires_grad) {
  return push("leaf", std::move(value), requires_grad, nullptr);
}

template <typename T>
Var Graph<T>::matmul(Var a, Var b, bool trans_b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (bv.rank() != 2 || av.rank() < 1) throw ShapeError("matmul", av.shape(), bv.shape());
  const int64_t k = av.dim(-1);
  const int64_t rows = k == 0 ? 0 : av.numel() / k;
  const int64_t bk = trans_b ? bv.dim(1) : bv.dim(0);
  const int64_t n = trans_b ? bv.dim(0) : bv.dim(1);
  if (bk != k) throw ShapeError("matmul", av.shape(), bv.shape());
  Shape out_shape(av.shape().begin(), av.shape().end() - 1);
  out_shape.push_back(n);
  TensorT out(out_shape);
  gemm<T>(false, trans_b, rows, n, k, T(1), av.ptr(), bv.ptr(), T(0), out.ptr());
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  const int out_id = static_cast<int>(nodes_.size());
  return push("matmul", std::move(out), rg, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    if (g.needs_grad(a)) {
      auto& da = g.grad_buffer(a);
      const auto& B = g.value(b);
      gemm<T>(false, !trans_b, rows, k, n, T(1), dc.ptr(), B.ptr(), T(1), da.ptr());
    }
    if (g.needs_grad(b)) {
      auto& db = g.grad_buffer(b);
      const auto& A = g.value(a);
      if (!trans_b) {
        gemm<T>(true, false, k, n, rows, T(1), A.ptr(), dc.ptr(), T(1), db.ptr());
      } else {
        gemm<T>(true, false, n, k, rows, T(1), dc.ptr(), A.ptr(), T(1), db.ptr());
      }
    }
  });
}

template <typename T>
Var Graph<T>::bmm(Var a, Var b, bool trans_a, bool trans_b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.rank() != 3 || bv.rank() != 3 || av.dim(0) != bv.dim(0)) throw ShapeError("bmm", av.shape(), bv.shape());
  const int64_t batch = av.dim(0);
  const int64_t m = trans_a ? av.dim(2) : av.dim(1);
  const int64_t k = trans_a ? av.dim(1) : av.dim(2);
  const int64_t bk = trans_b ? bv.dim(2) : bv.dim(1);
  const int64_t n = trans_b ? bv.dim(1) : bv.dim(2);
  if (bk != k) throw ShapeError("bmm", av.shape(), bv.shape());
  TensorT out({batch, m, n});
  for (int64_t i = 0; i < batch; ++i) {
    gemm<T>(trans_a, trans_b, m, n, k, T(1), av.ptr() + i * m * k, bv.ptr() + i * k * n, T(0),
            out.ptr() + i * m * n);
  }
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  const int out_id = static_cast<int>(nodes_.size());
  return push("bmm", std::move(out), rg, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    const auto& A = g.value(a);
    const auto& B = g.value(b);
    if (g.needs_grad(a)) {
      auto& da = g.grad_buffer(a);
      for (int64_t i = 0; i < batch; ++i) {
        const T* dci = dc.ptr() + i * m * n;
        const T* bi = B.ptr() + i * k * n;
        T* dai = da.ptr() + i * m * k;
        if (!trans_a) {
          gemm<T>(false, !trans_b, m, k, n, T(1), dci, bi, T(1), dai);
        } else {
          gemm<T>(trans_b, true, k, m, n, T(1), bi, dci, T(1), dai);
        }
      }
    }
    if (g.needs_grad(b)) {
      auto& db = g.grad_buffer(b);
      for (int64_t i = 0; i < batch; ++i) {
        const T* dci = dc.ptr() + i * m * n;
        const T* ai = A.ptr() + i * m * k;
        T* dbi = db.ptr() + i * k * n;
        if (!trans_b) {
          gemm<T>(!trans_a, false, k, n, m, T(1), ai, dci, T(1), dbi);
        } else {
          gemm<T>(true, trans_a, n, k, m, T(1), dci, ai, T(1), dbi);
        }
      }
    }
  });
}

template <typename T>
Var Graph<T>::add(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.shape() != bv.shape()) throw ShapeError("add", av.shape(), bv.shape());
  TensorT out = av;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] += bv[i];
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  const int out_id = static_cast<int>(nodes_.size());
  return push("add", std::move(out), rg, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    for (Var v : {a, b}) {
      if (!g.needs_grad(v)) continue;
      auto& d = g.grad_buffer(v);
      for (int64_t i = 0; i < d.numel(); ++i) d[i] += dc[i];
    }
  });
}

template <typename T>
Var Graph<T>::add_broadcast(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (bv.rank() > av.rank() || suffix(av.shape(), static_cast<size_t>(av.rank() - bv.rank())) != bv.shape()) {
    throw ShapeError("add_broadcast", av.shape(), bv.shape());
  }
  const int64_t w = bv.numel();
  TensorT out = av;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] += bv[i % w];
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  const int out_id = static_cast<int>(nodes_.size());
  return push("add_broadcast", std::move(out), rg, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    if (g.needs_grad(a)) {
      auto& d = g.grad_buffer(a);
      for (int64_t i = 0; i < d.numel(); ++i) d[i] += dc[i];
    }
    if (g.needs_grad(b)) {
      auto& d = g.grad_buffer(b);
      for (int64_t i = 0; i < dc.numel(); ++i) d[i % w] += dc[i];
    }
  });
}

template <typename T>
Var Graph<T>::mul(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.shape() != bv.shape()) throw ShapeError("mul", av.shape(), bv.shape());
  TensorT out = av;
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= bv[i];
  const bool rg = node(a).requires_grad || node(b).requires_grad;
  const int out_id = static_cast<int>(nodes_.size());
  return push("mul", std::move(out), rg, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    if (g.needs_grad(a)) {
      auto& d = g.grad_buffer(a);
      const auto& B = g.value(b);
      for (int64_t i = 0; i < d.numel(); ++i) d[i] += dc[i] * B[i];
    }
    if (g.needs_grad(b)) {
      auto& d = g.grad_buffer(b);
      const auto& A = g.value(a);
      for (int64_t i = 0; i < d.numel(); ++i) d[i] += dc[i] * A[i];
    }
  });
}

template <typename T>
Var Graph<T>::scale(Var a, T factor) {
  TensorT out = value(a);
  for (auto& x : out.storage()) x *= factor;
  const int out_id = static_cast<int>(nodes_.size());
  return push("scale", std::move(out), node(a).requires_grad, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    auto& d = g.grad_buffer(a);
    for (int64_t i = 0; i < d.numel(); ++i) d[i] += dc[i] * factor;
  });
}

template <typename T>
Var Graph<T>::relu(Var a) {
  TensorT out = value(a);
  for (auto& x : out.storage()) x = x > T(0) ? x : T(0);
  const int out_id = static_cast<int>(nodes_.size());
  return push("relu", std::move(out), node(a).requires_grad, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    const auto& y = g.nodes_[static_cast<size_t>(out_id)].value;
    auto& d = g.grad_buffer(a);
    for (int64_t i = 0; i < d.numel(); ++i) {
      if (y[i] > T(0)) d[i] += dc[i];
    }
  });
}

template <typename T>
Var Graph<T>::softmax(Var a, std::shared_ptr<const AttentionMask> mask) {
  const auto& av = value(a);
  if (av.rank() < 1) throw ShapeError("softmax", "expected rank >= 1, got " + shape_str(av.shape()));
  const int64_t cols = av.dim(-1);
  const int64_t rows = cols == 0 ? 0 : av.numel() / cols;
  int64_t period = 1;
  if (mask) {
    if (av.rank() < 2 || av.dim(-2) != mask->rows || cols != mask->cols) {
      throw ShapeError("softmax", av.shape(), Shape{mask->rows, mask->cols});
    }
    period = mask->rows;
  }
  TensorT out(av.shape());
  for (int64_t r = 0; r < rows; ++r) {
    const T* x = av.ptr() + r * cols;
    T* y = out.ptr() + r * cols;
    const int64_t q = r % period;
    T mx = -std::numeric_limits<T>::infinity();
    for (int64_t c = 0; c < cols; ++c) {
      if (!mask || mask->allowed(q, c)) mx = std::max(mx, x[c]);
    }
    if (!std::isfinite(mx)) throw ShapeError("softmax", "row " + std::to_string(r) + " has no allowed entries");
    T total = 0;
    for (int64_t c = 0; c < cols; ++c) {
      if (!mask || mask->allowed(q, c)) {
        y[c] = std::exp(x[c] - mx);
        total += y[c];
      }
    }
    for (int64_t c = 0; c < cols; ++c) y[c] /= total;
  }
  const int out_id = static_cast<int>(nodes_.size());
  return push("softmax", std::move(out), node(a).requires_grad, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    const auto& y = g.nodes_[static_cast<size_t>(out_id)].value;
    auto& d = g.grad_buffer(a);
    for (int64_t r = 0; r < rows; ++r) {
      const T* yr = y.ptr() + r * cols;
      const T* gr = dc.ptr() + r * cols;
      T dot = 0;
      for (int64_t c = 0; c < cols; ++c) dot += yr[c] * gr[c];
      T* dr = d.ptr() + r * cols;
      for (int64_t c = 0; c < cols; ++c) dr[c] += yr[c] * (gr[c] - dot);
    }
  });
}

template <typename T>
Var Graph<T>::embedding(Var table, std::vector<int32_t> ids) {
  const auto& tv = value(table);
  if (tv.rank() != 2) throw ShapeError("embedding", "table must be rank 2, got " + shape_str(tv.shape()));
  const int64_t vocab = tv.dim(0);
  const int64_t d = tv.dim(1);
  const auto n = static_cast<int64_t>(ids.size());
  TensorT out({n, d});
  for (int64_t i = 0; i < n; ++i) {
    const int32_t id = ids[static_cast<size_t>(i)];
    if (id < 0 || id >= vocab) {
      throw ShapeError("embedding", "token id " + std::to_string(id) + " at index " + std::to_string(i) +
                                        " outside vocabulary of size " + std::to_string(vocab));
    }
    std::copy_n(tv.ptr() + id * d, d, out.ptr() + i * d);
  }
  const int out_id = static_cast<int>(nodes_.size());
  return push("embedding", std::move(out), node(table).requires_grad,
              [=, ids = std::move(ids)](Graph& g) {
                const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
                auto& dt = g.grad_buffer(table);
                for (int64_t i = 0; i < n; ++i) {
                  T* dst = dt.ptr() + ids[static_cast<size_t>(i)] * d;
                  const T* src = dc.ptr() + i * d;
                  for (int64_t j = 0; j < d; ++j) dst[j] += src[j];
                }
              });
}

template <typename T>
Var Graph<T>::cross_entropy(Var logits, std::vector<int32_t> targets) {
  const auto& lv = value(logits);
  if (lv.rank() != 2 || lv.dim(0) != static_cast<int64_t>(targets.size())) {
    throw ShapeError("cross_entropy", lv.shape(), Shape{static_cast<int64_t>(targets.size())});
  }
  const int64_t n = lv.dim(0);
  const int64_t c = lv.dim(1);
  if (n == 0) throw ShapeError("cross_entropy", "empty batch");
  TensorT probs(lv.shape());
  double loss = 0;
  for (int64_t i = 0; i < n; ++i) {
    const int32_t t = targets[static_cast<size_t>(i)];
    if (t < 0 || t >= c) throw ShapeError("cross_entropy", "target " + std::to_string(t) + " outside [0, " + std::to_string(c) + ")");
    const T* x = lv.ptr() + i * c;
    T* p = probs.ptr() + i * c;
    const T mx = *std::max_element(x, x + c);
    T total = 0;
    for (int64_t j = 0; j < c; ++j) {
      p[j] = std::exp(x[j] - mx);
      total += p[j];
    }
    for (int64_t j = 0; j < c; ++j) p[j] /= total;
    loss += static_cast<double>(mx + std::log(total) - x[t]);
  }
  TensorT out = TensorT::scalar(static_cast<T>(loss / static_cast<double>(n)));
  const int out_id = static_cast<int>(nodes_.size());
  return push("cross_entropy", std::move(out), node(logits).requires_grad,
              [=, targets = std::move(targets), probs = std::move(probs)](Graph& g) {
                const T up = g.nodes_[static_cast<size_t>(out_id)].grad[0] / static_cast<T>(n);
                auto& d = g.grad_buffer(logits);
                for (int64_t i = 0; i < n; ++i) {
                  for (int64_t j = 0; j < c; ++j) {
                    T gij = probs[i * c + j];
                    if (j == targets[static_cast<size_t>(i)]) gij -= T(1);
                    d[i * c + j] += up * gij;
                  }
                }
              });
}

template <typename T>
Var Graph<T>::slice(Var a, int64_t axis, int64_t begin, int64_t end) {
  const auto& av = value(a);
  const int64_t ax = norm_axis(axis, av.rank(), "slice");
  const int64_t len = av.dim(ax);
  if (begin < 0 || end > len || begin > end) {
    throw ShapeError("slice", "range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                  ") invalid for axis of length " + std::to_string(len) + " in " + shape_str(av.shape()));
  }
  int64_t outer = 1;
  for (int64_t i = 0; i < ax; ++i) outer *= av.dim(i);
  int64_t inner = 1;
  for (int64_t i = ax + 1; i < av.rank(); ++i) inner *= av.dim(i);
  Shape out_shape = av.shape();
  out_shape[static_cast<size_t>(ax)] = end - begin;
  TensorT out(out_shape);
  const int64_t span = (end - begin) * inner;
  for (int64_t o = 0; o < outer; ++o) {
    std::copy_n(av.ptr() + (o * len + begin) * inner, span, out.ptr() + o * span);
  }
  const int out_id = static_cast<int>(nodes_.size());
  return push("slice", std::move(out), node(a).requires_grad, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    auto& d = g.grad_buffer(a);
    for (int64_t o = 0; o < outer; ++o) {
      T* dst = d.ptr() + (o * len + begin) * inner;
      const T* src = dc.ptr() + o * span;
      for (int64_t j = 0; j < span; ++j) dst[j] += src[j];
    }
  });
}

template <typename T>
Var Graph<T>::concat(const std::vector<Var>& parts, int64_t axis) {
  if (parts.empty()) throw ShapeError("concat", "no operands");
  const auto& first = value(parts.front());
  const int64_t ax = norm_axis(axis, first.rank(), "concat");
  int64_t outer = 1;
  for (int64_t i = 0; i < ax; ++i) outer *= first.dim(i);
  int64_t inner = 1;
  for (int64_t i = ax + 1; i < first.rank(); ++i) inner *= first.dim(i);
  int64_t total = 0;
  std::vector<int64_t> lens;
  bool rg = false;
  for (const Var p : parts) {
    const auto& pv = value(p);
    Shape expect = first.shape();
    if (pv.rank() != first.rank()) throw ShapeError("concat", first.shape(), pv.shape());
    expect[static_cast<size_t>(ax)] = pv.dim(ax);
    if (expect != pv.shape()) throw ShapeError("concat", first.shape(), pv.shape());
    lens.push_back(pv.dim(ax));
    total += pv.dim(ax);
    rg = rg || node(p).requires_grad;
  }
  Shape out_shape = first.shape();
  out_shape[static_cast<size_t>(ax)] = total;
  TensorT out(out_shape);
  int64_t offset = 0;
  for (size_t pi = 0; pi < parts.size(); ++pi) {
    const auto& pv = value(parts[pi]);
    const int64_t span = lens[pi] * inner;
    for (int64_t o = 0; o < outer; ++o) {
      std::copy_n(pv.ptr() + o * span, span, out.ptr() + (o * total + offset) * inner);
    }
    offset += lens[pi];
  }
  const int out_id = static_cast<int>(nodes_.size());
  return push("concat", std::move(out), rg, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    int64_t off = 0;
    for (size_t pi = 0; pi < parts.size(); ++pi) {
      const int64_t span = lens[pi] * inner;
      if (g.needs_grad(parts[pi])) {
        auto& d = g.grad_buffer(parts[pi]);
        for (int64_t o = 0; o < outer; ++o) {
          const T* src = dc.ptr() + (o * total + off) * inner;
          T* dst = d.ptr() + o * span;
          for (int64_t j = 0; j < span; ++j) dst[j] += src[j];
        }
      }
      off += lens[pi];
    }
  });
}

template <typename T>
Var Graph<T>::transpose(Var a) {
  const auto& av = value(a);
  if (av.rank() != 2 && av.rank() != 3) throw ShapeError("transpose", "expected rank 2 or 3, got " + shape_str(av.shape()));
  const int64_t batch = av.rank() == 3 ? av.dim(0) : 1;
  const int64_t m = av.dim(-2);
  const int64_t n = av.dim(-1);
  Shape out_shape = av.shape();
  std::swap(out_shape[out_shape.size() - 1], out_shape[out_shape.size() - 2]);
  TensorT out(out_shape);
  for (int64_t b = 0; b < batch; ++b) {
    for (int64_t i = 0; i < m; ++i) {
      for (int64_t j = 0; j < n; ++j) out[b * m * n + j * m + i] = av[b * m * n + i * n + j];
    }
  }
  const int out_id = static_cast<int>(nodes_.size());
  return push("transpose", std::move(out), node(a).requires_grad, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    auto& d = g.grad_buffer(a);
    for (int64_t b = 0; b < batch; ++b) {
      for (int64_t i = 0; i < m; ++i) {
        for (int64_t j = 0; j < n; ++j) d[b * m * n + i * n + j] += dc[b * m * n + j * m + i];
      }
    }
  });
}

template <typename T>
Var Graph<T>::reshape(Var a, Shape shape) {
  TensorT out = value(a).reshaped(std::move(shape));
  const int out_id = static_cast<int>(nodes_.size());
  return push("reshape", std::move(out), node(a).requires_grad, [=](Graph& g) {
    const auto& dc = g.nodes_[static_cast<size_t>(out_id)].grad;
    auto& d = g.grad_buffer(a);
    for (int64_t i = 0; i < d.numel(); ++i) d[i] += dc[i];
  });
}

template <typename T>
Var Graph<T>::sum(Var a) {
  const auto& av = value(a);
  T total = 0;
  for (const T x : av.data()) total += x;
  const int out_id = static_cast<int>(nodes_.size());
  return push("sum", TensorT::scalar(total), node(a).requires_grad, [=](Graph& g) {
    const T up = g.nodes_[static_cast<size_t>(out_id)].grad[0];
    auto& d = g.grad_buffer(a);
    for (int64_t i = 0; i < d.numel(); ++i) d[i] += up;
  });
}

template <typename T>
void Graph<T>::backward(Var root) {
  const auto& rv = value(root);
  if (rv.numel() != 1) {
    throw ShapeError("backward", "loss node must be scalar, got shape " + shape_str(rv.shape()));
  }
  for (auto& n : nodes_) n.grad = TensorT();
  if (!needs_grad(root)) return;
  grad_buffer(root)[0] = T(1);
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<size_t>(i)];
    if (!n.backward || n.grad.numel() != n.value.numel()) continue;
    n.backward(*this);
  }
}

template <typename T>
Evaluation<T> ad_evaluate(const Expression<T>& expr, const std::map<std::string, BasicTensor<T>>& inputs) {
  Graph<T> g(true);
  std::map<std::string, Var> vars;
  for (const auto& [name, t] : inputs) vars[name] = g.leaf(t, true);
  const Var out = expr(g, vars);
  g.backward(out);
  Evaluation<T> result;
  result.value = g.value(out);
  for (const auto& [name, v] : vars) result.gradients[name] = g.grad(v);
  return result;
}

template class Graph<float>;
template class Graph<double>;
template Evaluation<float> ad_evaluate(const Expression<float>&, const std::map<std::string, BasicTensor<float>>&);
template Evaluation<double> ad_evaluate(const Expression<double>&, const std::map<std::string, BasicTensor<double>>&);

}  // namespace axval::nn
