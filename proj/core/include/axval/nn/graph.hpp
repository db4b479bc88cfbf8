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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "axval/nn/tensor.hpp"

namespace axval::nn {

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Boolean [rows, cols] pattern; entry (q, k) allows query row q to read key k.
struct AttentionMask {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<uint8_t> allow;

  static AttentionMask causal(int64_t n);
  bool allowed(int64_t q, int64_t k) const { return allow[static_cast<size_t>(q * cols + k)] != 0; }
};

// Reverse-mode autodiff tape over dense tensors. Ops check that results are
// finite. With record = false only forward values are kept.
template <typename T>
class Graph {
 public:
  using TensorT = BasicTensor<T>;

  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var leaf(TensorT value, bool requires_grad);
  Var constant(TensorT value) { return leaf(std::move(value), false); }

  // a: [..., k] viewed as [rows, k]; b: [k, n] (or [n, k] when trans_b).
  Var matmul(Var a, Var b, bool trans_b = false);
  // Batched product of [B, m, k] and [B, k, n] operands.
  Var bmm(Var a, Var b, bool trans_a = false, bool trans_b = false);
  Var add(Var a, Var b);
  // a + b where b's shape is a suffix of a's shape; b is tiled over the leading dims.
  Var add_broadcast(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, T factor);
  Var relu(Var a);
  // Softmax over the last axis. With a mask, a is [..., rows, cols] and
  // disallowed entries receive probability 0.
  Var softmax(Var a, std::shared_ptr<const AttentionMask> mask = nullptr);
  // Rows of `table` ([V, d]) selected by ids; result [ids.size(), d].
  Var embedding(Var table, std::vector<int32_t> ids);
  // Mean softmax cross-entropy of logits [N, C] against integer targets.
  Var cross_entropy(Var logits, std::vector<int32_t> targets);
  Var slice(Var a, int64_t axis, int64_t begin, int64_t end);
  Var concat(const std::vector<Var>& parts, int64_t axis);
  // Swaps the last two axes (rank 2 or 3).
  Var transpose(Var a);
  Var reshape(Var a, Shape shape);
  Var sum(Var a);

  const TensorT& value(Var v) const { return node(v).value; }
  const Shape& shape(Var v) const { return node(v).value.shape(); }
  // Gradient of the last backward() root with respect to v (zeros if unreached).
  TensorT grad(Var v) const;

  // Reverse sweep from a scalar node.
  void backward(Var root);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    TensorT value;
    TensorT grad;
    bool requires_grad = false;
    std::function<void(Graph&)> backward;
  };

  Node& node(Var v) { return nodes_.at(static_cast<size_t>(v.id)); }
  const Node& node(Var v) const { return nodes_.at(static_cast<size_t>(v.id)); }
  bool needs_grad(Var v) const { return record_ && node(v).requires_grad; }
  TensorT& grad_buffer(Var v);
  Var push(const char* op, TensorT value, bool requires_grad, std::function<void(Graph&)> back);

  bool record_;
  std::vector<Node> nodes_;
};

template <typename T>
struct Evaluation {
  BasicTensor<T> value;
  std::map<std::string, BasicTensor<T>> gradients;
};

template <typename T>
using Expression = std::function<Var(Graph<T>&, const std::map<std::string, Var>&)>;

// Value of a scalar expression and its gradient for every named input.
template <typename T>
Evaluation<T> ad_evaluate(const Expression<T>& expr,
                          const std::map<std::string, BasicTensor<T>>& inputs);

}  // namespace axval::nn
