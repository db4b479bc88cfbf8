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
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "axval/sat/formula.hpp"

namespace axval::abstract {

// Boolean expression over the 32 atoms phi[a].
class Expr {
 public:
  enum class Kind { kFalse, kTrue, kAtom, kNot, kAnd, kOr };

  static Expr constant(bool value);
  static Expr atom(int assignment);
  static Expr negate(Expr e);
  static Expr conj(Expr a, Expr b);
  static Expr disj(Expr a, Expr b);
  // Left-nested OR of atoms; constant false when empty.
  static Expr any_of(const std::vector<int>& assignments);

  Kind kind() const { return node_->kind; }
  int assignment() const { return node_->atom; }
  const Expr& lhs() const { return node_->children.at(0); }
  const Expr& rhs() const { return node_->children.at(1); }

  bool eval(sat::FeatureProfile profile) const;
  // 64 atom vectors at once: atoms[a] holds bit j = value of phi[a] in vector j.
  uint64_t eval_words(const uint64_t* atoms) const;
  // Bit a set iff phi[a] occurs.
  uint32_t atoms_used() const;
  bool disjunction_only() const;

  std::string str() const;
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node {
    Kind kind = Kind::kFalse;
    int atom = 0;
    std::vector<Expr> children;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

class ExprParseError : public std::runtime_error {
 public:
  ExprParseError(const std::string& what, size_t pos)
      : std::runtime_error(what + " at offset " + std::to_string(pos)), pos_(pos) {}
  size_t offset() const { return pos_; }

 private:
  size_t pos_;
};

// atom := phi[TTFFT]; expr := atom | true | false | !expr | (expr & expr) | (expr | expr)
Expr parse_expr(const std::string& text);

struct NeuronInterpretation {
  int neuron = 0;
  Expr expr = Expr::constant(false);
  std::string provenance;  // dtree | disjunction-only | ideal
};

std::vector<NeuronInterpretation> parse_interpretations(const std::string& text, const std::string& provenance);
std::vector<NeuronInterpretation> read_interpretations(const std::filesystem::path& path, const std::string& provenance);
std::string format_interpretations(const std::vector<NeuronInterpretation>& interps);

// The 32 singleton neurons phi[0] .. phi[31].
std::vector<NeuronInterpretation> ideal_interpretations();

}  // namespace axval::abstract
