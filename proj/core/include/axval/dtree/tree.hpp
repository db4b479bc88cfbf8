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
#include <optional>
#include <string>
#include <vector>

#include "axval/abstract/expr.hpp"
#include "axval/sat/formula.hpp"

namespace axval::dtree {

// Binary tree over the atoms phi[a]. Node 0 is the root.
struct DecisionTree {
  struct Node {
    int atom = -1;  // -1 for leaves
    int if_false = -1;
    int if_true = -1;
    bool prediction = false;
    int64_t samples = 0;
    int64_t positives = 0;
  };
  std::vector<Node> nodes;

  int leaves() const;
  bool predict(sat::FeatureProfile profile) const;
};

// Best-first Gini splits until `max_leaves` leaves or no split lowers impurity.
// Ties go to the lower atom, then to the earlier leaf. Majority leaves, ties false.
DecisionTree fit_tree(const std::vector<sat::FeatureProfile>& features, const std::vector<bool>& labels, int max_leaves);

// OR over true leaves of the conjunction of path tests, root first.
abstract::Expr to_boolean_expr(const DecisionTree& tree);

// OR of atoms whose conditional mean exceeds the threshold; empty OR is false.
abstract::Expr derive_disjunction_only(const std::vector<std::optional<double>>& atom_means, double threshold = 0.5);

struct F1Result {
  double f1 = 0.0;
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;
  // No positives in prediction or truth; F1 reported as 0.
  bool degenerate = false;
};

F1Result f1_score(const std::vector<bool>& predicted, const std::vector<bool>& actual);
F1Result f1_eval(const abstract::Expr& expr, const std::vector<sat::FeatureProfile>& features,
                 const std::vector<bool>& labels);

}  // namespace axval::dtree
