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
#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "axval/axioms/engine.hpp"

namespace axval::axioms {

using Op = std::function<std::any(const std::vector<std::any>&)>;
using ValueFn = std::function<std::any(const std::any&)>;
using ValueEq = std::function<bool(const std::any&, const std::any&)>;
// Vertex values; an empty std::any is the undefined value.
using Env = std::vector<std::any>;

class CompGraph {
 public:
  struct Vertex {
    std::string name;
    Op op;                   // empty for the input vertex
    std::vector<int> preds;  // in argument order
  };

  int add_input(const std::string& name);
  int add(const std::string& name, Op op, std::vector<int> preds);
  void set_output(int v);

  int input() const { return input_; }
  int output() const { return output_; }
  size_t size() const { return vertices_.size(); }
  const Vertex& vertex(int v) const { return vertices_.at(static_cast<size_t>(v)); }

  // Kahn order, smallest index first among ready vertices; throws on cycles.
  std::vector<int> topological_order() const;
  Env execute(const std::any& x) const;
  // Assigned vertices keep their values; the input must be assigned.
  Env propagate(const std::map<int, std::any>& assign) const;

 private:
  std::vector<Vertex> vertices_;
  int input_ = -1;
  int output_ = -1;
};

// Pi maps concrete vertex v to abstract vertex pi[v]. Throws unless pi is a
// bijection preserving inputs, outputs and predecessor lists.
void check_isomorphism(const CompGraph& g, const CompGraph& h, const std::vector<int>& pi);

struct GraphInterpretation {
  const CompGraph* concrete = nullptr;
  const CompGraph* abstract = nullptr;
  std::vector<int> pi;
  std::vector<ValueFn> alpha;       // per concrete vertex
  std::vector<ValueFn> gamma;       // per abstract vertex
  std::vector<ValueEq> abstract_eq;  // per abstract vertex
  ValueEq output_eq;                 // concrete output values

  void validate() const;
};

// counts[v][axiom - 1], axioms in the order of the linear engine.
std::vector<std::array<Counts, 4>> check_graph_axioms(const GraphInterpretation& gi, const std::vector<std::any>& dataset);
Counts check_graph_axiom(Axiom kind, const GraphInterpretation& gi, int v, const std::vector<std::any>& dataset);

// Mixed execution: vertices in `swapped` run their abstract operation on
// abstracted inputs and hold abstract values; the others run concretely on
// concretized inputs.
Env execute_interleaved(const GraphInterpretation& gi, const std::vector<bool>& swapped, const std::any& x);
// alpha_v for v outside `swapped`, identity inside.
Env conditional_abstract(const GraphInterpretation& gi, const std::vector<bool>& swapped, const Env& values);

struct ParallelResult {
  uint32_t subset = 0;  // bit v set iff v is swapped
  int vertex = 0;
  Counts counts;
};

// Exhaustive over all vertex subsets; graphs above 10 vertices are rejected.
std::vector<ParallelResult> check_parallel_equivalence(const GraphInterpretation& gi, const std::vector<std::any>& dataset);

// Sequential components over environments: input_env, then execute_op for
// each non-input vertex in topological order, the last one followed by
// select(out). Per-sample functions.
struct Linearization {
  std::vector<int> order;
  std::vector<ValueFn> components;
};

Linearization linearize(const CompGraph& g);

// Lifts a per-sample function to batches held as std::vector<std::any>.
Fn batched(ValueFn f);
Eq batched_eq(ValueEq f);

// Linear bundle over the two linearizations; environment boundaries use the
// per-vertex operators on every defined vertex.
Bundle linearized_bundle(const GraphInterpretation& gi);

}  // namespace axval::axioms
