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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace axval::sat {

constexpr int kVars = 5;
constexpr int kClauses = 10;
constexpr int kAssignments = 32;
constexpr int kContext = 4 * kClauses + 1;
constexpr int kReadout = kContext - 1;

// Token ids. Literal x_i is i, its negation i + 5.
enum Token : int32_t {
  kOpen = 10,
  kClose = 11,
  kColon = 12,
  kSat = 13,
  kUnsat = 14,
  kVocab = 15,
};

struct Literal {
  int var = 0;
  bool neg = false;

  int32_t token() const { return var + (neg ? kVars : 0); }
  static Literal from_token(int32_t t);
  bool holds(uint32_t assignment) const { return (((assignment >> var) & 1u) != 0) != neg; }
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Clause {
  Literal l;
  Literal r;

  // Ordered index in [0, 100): token(l) * 10 + token(r).
  int index() const { return l.token() * 10 + r.token(); }
  static Clause from_index(int idx);
  bool same_unordered(const Clause& o) const { return (l == o.l && r == o.r) || (l == o.r && r == o.l); }
  friend bool operator==(const Clause&, const Clause&) = default;
};

constexpr int kOrderedClauses = 100;

using Formula = std::array<Clause, kClauses>;
using FeatureProfile = uint32_t;
using Tokens = std::vector<int32_t>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  int position() const { return position_; }

 private:
  int position_;
};

// Bit a set iff assignment a (bit i = x_i) satisfies every clause.
FeatureProfile brute_force_profile(std::span<const Clause> clauses);
// Implication-graph SCC decision.
bool scc_sat(std::span<const Clause> clauses);

Tokens tokenize(const Formula& f);
Formula detokenize(std::span<const int32_t> tokens);

// "(x0x1)(x1¬x2)...:" with optional trailing label 's'/'u'.
std::string to_string(const Formula& f);
std::string to_line(const Formula& f, bool sat);
Formula parse_formula(const std::string& s);
std::pair<Formula, bool> parse_line(const std::string& line);

// "TFFFF" -> 1 (letter i is x_i).
uint32_t assignment_from_pattern(const std::string& pattern);
std::string pattern_of(uint32_t assignment);

}  // namespace axval::sat
