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

#include "axval/dtree/tree.hpp"

#include <stdexcept>

namespace axval::dtree {

int DecisionTree::leaves() const {
  int n = 0;
  for (const auto& node : nodes) n += node.atom < 0 ? 1 : 0;
  return n;
}

bool DecisionTree::predict(sat::FeatureProfile profile) const {
  if (nodes.empty()) throw std::logic_error("empty decision tree");
  int i = 0;
  while (nodes[static_cast<size_t>(i)].atom >= 0) {
    const auto& node = nodes[static_cast<size_t>(i)];
    i = ((profile >> node.atom) & 1u) ? node.if_true : node.if_false;
  }
  return nodes[static_cast<size_t>(i)].prediction;
}

namespace {

double gini_mass(int64_t n, int64_t pos) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(n);
  return static_cast<double>(n) * 2.0 * p * (1.0 - p);
}

struct Candidate {
  int atom = -1;
  double gain = 0.0;
};

Candidate best_split(const std::vector<sat::FeatureProfile>& features, const std::vector<bool>& labels,
                     const std::vector<int64_t>& rows, uint32_t used) {
  int64_t n1[sat::kAssignments] = {};
  int64_t p1[sat::kAssignments] = {};
  int64_t pos = 0;
  for (const int64_t r : rows) {
    const auto f = features[static_cast<size_t>(r)];
    const bool y = labels[static_cast<size_t>(r)];
    pos += y ? 1 : 0;
    for (int a = 0; a < sat::kAssignments; ++a) {
      if ((f >> a) & 1u) {
        ++n1[a];
        p1[a] += y ? 1 : 0;
      }
    }
  }
  const auto n = static_cast<int64_t>(rows.size());
  const double parent = gini_mass(n, pos);
  Candidate best;
  for (int a = 0; a < sat::kAssignments; ++a) {
    if ((used >> a) & 1u) continue;
    if (n1[a] == 0 || n1[a] == n) continue;
    const double gain = parent - gini_mass(n1[a], p1[a]) - gini_mass(n - n1[a], pos - p1[a]);
    if (gain > best.gain + 1e-12) best = Candidate{a, gain};
  }
  return best;
}

}  // namespace

DecisionTree fit_tree(const std::vector<sat::FeatureProfile>& features, const std::vector<bool>& labels, int max_leaves) {
  if (features.empty() || features.size() != labels.size()) throw std::invalid_argument("fit_tree: need matching nonempty samples");
  if (max_leaves < 1) throw std::invalid_argument("fit_tree: max_leaves must be positive");
  struct Leaf {
    int node;
    std::vector<int64_t> rows;
    uint32_t used;
    Candidate split;
  };
  DecisionTree tree;
  auto make_node = [&](const std::vector<int64_t>& rows) {
    DecisionTree::Node node;
    node.samples = static_cast<int64_t>(rows.size());
    for (const int64_t r : rows) node.positives += labels[static_cast<size_t>(r)] ? 1 : 0;
    node.prediction = 2 * node.positives > node.samples;
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size() - 1);
  };
  std::vector<int64_t> all(features.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int64_t>(i);
  std::vector<Leaf> open;
  const int root = make_node(all);
  open.push_back(Leaf{root, all, 0u, best_split(features, labels, all, 0u)});
  int leaves = 1;
  while (leaves < max_leaves) {
    int pick = -1;
    for (size_t i = 0; i < open.size(); ++i) {
      if (open[i].split.atom < 0) continue;
      if (pick < 0 || open[i].split.gain > open[static_cast<size_t>(pick)].split.gain + 1e-12) pick = static_cast<int>(i);
    }
    if (pick < 0) break;
    Leaf leaf = std::move(open[static_cast<size_t>(pick)]);
    open.erase(open.begin() + pick);
    const int a = leaf.split.atom;
    std::vector<int64_t> f_rows;
    std::vector<int64_t> t_rows;
    for (const int64_t r : leaf.rows) ((features[static_cast<size_t>(r)] >> a) & 1u ? t_rows : f_rows).push_back(r);
    const uint32_t used = leaf.used | (1u << a);
    const int nf = make_node(f_rows);
    const int nt = make_node(t_rows);
    auto& parent = tree.nodes[static_cast<size_t>(leaf.node)];
    parent.atom = a;
    parent.if_false = nf;
    parent.if_true = nt;
    open.push_back(Leaf{nf, f_rows, used, best_split(features, labels, f_rows, used)});
    open.push_back(Leaf{nt, t_rows, used, best_split(features, labels, t_rows, used)});
    ++leaves;
  }
  return tree;
}

namespace {

void collect(const DecisionTree& t, int i, std::vector<abstract::Expr>& path, std::vector<abstract::Expr>& terms) {
  const auto& node = t.nodes[static_cast<size_t>(i)];
  if (node.atom < 0) {
    if (!node.prediction) return;
    if (path.empty()) {
      terms.push_back(abstract::Expr::constant(true));
      return;
    }
    abstract::Expr conj = path.front();
    for (size_t k = 1; k < path.size(); ++k) conj = abstract::Expr::conj(conj, path[k]);
    terms.push_back(conj);
    return;
  }
  path.push_back(abstract::Expr::atom(node.atom));
  collect(t, node.if_true, path, terms);
  path.back() = abstract::Expr::negate(abstract::Expr::atom(node.atom));
  collect(t, node.if_false, path, terms);
  path.pop_back();
}

}  // namespace

abstract::Expr to_boolean_expr(const DecisionTree& tree) {
  if (tree.nodes.empty()) throw std::invalid_argument("to_boolean_expr: empty tree");
  std::vector<abstract::Expr> path;
  std::vector<abstract::Expr> terms;
  collect(tree, 0, path, terms);
  if (terms.empty()) return abstract::Expr::constant(false);
  abstract::Expr out = terms.front();
  for (size_t k = 1; k < terms.size(); ++k) out = abstract::Expr::disj(out, terms[k]);
  return out;
}

abstract::Expr derive_disjunction_only(const std::vector<std::optional<double>>& atom_means, double threshold) {
  if (atom_means.size() != sat::kAssignments) throw std::invalid_argument("derive_disjunction_only expects 32 means");
  std::vector<int> atoms;
  for (int a = 0; a < sat::kAssignments; ++a) {
    const auto& m = atom_means[static_cast<size_t>(a)];
    if (m && *m > threshold) atoms.push_back(a);
  }
  return abstract::Expr::any_of(atoms);
}

F1Result f1_score(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("f1_score: size mismatch");
  F1Result r;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && actual[i]) ++r.tp;
    else if (predicted[i]) ++r.fp;
    else if (actual[i]) ++r.fn;
    else ++r.tn;
  }
  const int64_t denom = 2 * r.tp + r.fp + r.fn;
  if (denom == 0) {
    r.degenerate = true;
    r.f1 = 0.0;
  } else {
    r.f1 = 2.0 * static_cast<double>(r.tp) / static_cast<double>(denom);
  }
  return r;
}

F1Result f1_eval(const abstract::Expr& expr, const std::vector<sat::FeatureProfile>& features,
                 const std::vector<bool>& labels) {
  std::vector<bool> pred(features.size());
  for (size_t i = 0; i < features.size(); ++i) pred[i] = expr.eval(features[i]);
  return f1_score(pred, labels);
}

}  // namespace axval::dtree
