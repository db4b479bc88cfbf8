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

#include "axval/abstract/expr.hpp"

#include <sstream>

#include "axval/io/container.hpp"

namespace axval::abstract {

Expr Expr::constant(bool value) {
  auto n = std::make_shared<Node>();
  n->kind = value ? Kind::kTrue : Kind::kFalse;
  return Expr(std::move(n));
}

Expr Expr::atom(int assignment) {
  if (assignment < 0 || assignment >= sat::kAssignments) {
    throw std::out_of_range("atom index " + std::to_string(assignment) + " outside [0, 32)");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::kAtom;
  n->atom = assignment;
  return Expr(std::move(n));
}

Expr Expr::negate(Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kNot;
  n->children = {std::move(e)};
  return Expr(std::move(n));
}

Expr Expr::conj(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kAnd;
  n->children = {std::move(a), std::move(b)};
  return Expr(std::move(n));
}

Expr Expr::disj(Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kOr;
  n->children = {std::move(a), std::move(b)};
  return Expr(std::move(n));
}

Expr Expr::any_of(const std::vector<int>& assignments) {
  if (assignments.empty()) return constant(false);
  Expr e = atom(assignments.front());
  for (size_t i = 1; i < assignments.size(); ++i) e = disj(e, atom(assignments[i]));
  return e;
}

bool Expr::eval(sat::FeatureProfile profile) const {
  switch (kind()) {
    case Kind::kFalse: return false;
    case Kind::kTrue: return true;
    case Kind::kAtom: return ((profile >> node_->atom) & 1u) != 0;
    case Kind::kNot: return !lhs().eval(profile);
    case Kind::kAnd: return lhs().eval(profile) && rhs().eval(profile);
    case Kind::kOr: return lhs().eval(profile) || rhs().eval(profile);
  }
  return false;
}

uint64_t Expr::eval_words(const uint64_t* atoms) const {
  switch (kind()) {
    case Kind::kFalse: return 0;
    case Kind::kTrue: return ~uint64_t{0};
    case Kind::kAtom: return atoms[node_->atom];
    case Kind::kNot: return ~lhs().eval_words(atoms);
    case Kind::kAnd: return lhs().eval_words(atoms) & rhs().eval_words(atoms);
    case Kind::kOr: return lhs().eval_words(atoms) | rhs().eval_words(atoms);
  }
  return 0;
}

uint32_t Expr::atoms_used() const {
  switch (kind()) {
    case Kind::kFalse:
    case Kind::kTrue: return 0;
    case Kind::kAtom: return 1u << node_->atom;
    case Kind::kNot: return lhs().atoms_used();
    default: return lhs().atoms_used() | rhs().atoms_used();
  }
}

bool Expr::disjunction_only() const {
  switch (kind()) {
    case Kind::kFalse:
    case Kind::kAtom: return true;
    case Kind::kOr: return lhs().disjunction_only() && rhs().disjunction_only();
    default: return false;
  }
}

std::string Expr::str() const {
  switch (kind()) {
    case Kind::kFalse: return "false";
    case Kind::kTrue: return "true";
    case Kind::kAtom: return "phi[" + sat::pattern_of(static_cast<uint32_t>(node_->atom)) + "]";
    case Kind::kNot: return "!" + lhs().str();
    case Kind::kAnd: return "(" + lhs().str() + " & " + rhs().str() + ")";
    case Kind::kOr: return "(" + lhs().str() + " | " + rhs().str() + ")";
  }
  return "";
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::kFalse:
    case Expr::Kind::kTrue: return true;
    case Expr::Kind::kAtom: return a.assignment() == b.assignment();
    case Expr::Kind::kNot: return a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) throw ExprParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool accept(const std::string& tok) {
    skip();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!accept(tok)) throw ExprParseError("expected '" + tok + "'", pos_);
  }

  Expr expr() {
    skip();
    if (accept("!")) return Expr::negate(expr());
    if (accept("true")) return Expr::constant(true);
    if (accept("false")) return Expr::constant(false);
    if (accept("phi[")) {
      const size_t at = pos_;
      if (pos_ + sat::kVars > s_.size()) throw ExprParseError("truncated atom", at);
      uint32_t a = 0;
      try {
        a = sat::assignment_from_pattern(s_.substr(pos_, sat::kVars));
      } catch (const std::invalid_argument&) {
        throw ExprParseError("atom pattern must be 5 letters T/F", at);
      }
      pos_ += sat::kVars;
      expect("]");
      return Expr::atom(static_cast<int>(a));
    }
    if (accept("(")) {
      Expr lhs = expr();
      skip();
      bool is_and;
      if (accept("&")) {
        is_and = true;
      } else if (accept("|")) {
        is_and = false;
      } else {
        throw ExprParseError("expected '&' or '|'", pos_);
      }
      Expr rhs = expr();
      expect(")");
      return is_and ? Expr::conj(lhs, rhs) : Expr::disj(lhs, rhs);
    }
    throw ExprParseError("expected expression", pos_);
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).parse(); }

std::vector<NeuronInterpretation> parse_interpretations(const std::string& text, const std::string& provenance) {
  std::vector<NeuronInterpretation> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    int id = 0;
    if (!(ls >> id)) throw std::runtime_error("interpretation line " + std::to_string(lineno) + ": missing neuron id");
    for (const auto& n : out) {
      if (n.neuron == id) throw std::runtime_error("interpretation line " + std::to_string(lineno) + ": neuron " + std::to_string(id) + " repeated");
    }
    std::string rest;
    std::getline(ls, rest);
    try {
      out.push_back(NeuronInterpretation{id, parse_expr(rest), provenance});
    } catch (const ExprParseError& e) {
      throw std::runtime_error("interpretation line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<NeuronInterpretation> read_interpretations(const std::filesystem::path& path, const std::string& provenance) {
  return parse_interpretations(io::read_file(path), provenance);
}

std::string format_interpretations(const std::vector<NeuronInterpretation>& interps) {
  std::string out;
  for (const auto& n : interps) out += std::to_string(n.neuron) + " " + n.expr.str() + "\n";
  return out;
}

std::vector<NeuronInterpretation> ideal_interpretations() {
  std::vector<NeuronInterpretation> out;
  for (int a = 0; a < sat::kAssignments; ++a) out.push_back(NeuronInterpretation{a, Expr::atom(a), "ideal"});
  return out;
}

}  // namespace axval::abstract
