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

#include "axval/sat/formula.hpp"

#include <functional>

namespace axval::sat {

Literal Literal::from_token(int32_t t) {
  if (t < 0 || t >= 2 * kVars) throw std::invalid_argument("token " + std::to_string(t) + " is not a literal");
  return Literal{t % kVars, t >= kVars};
}

Clause Clause::from_index(int idx) {
  if (idx < 0 || idx >= kOrderedClauses) throw std::invalid_argument("clause index " + std::to_string(idx) + " out of range");
  return Clause{Literal::from_token(idx / 10), Literal::from_token(idx % 10)};
}

FeatureProfile brute_force_profile(std::span<const Clause> clauses) {
  FeatureProfile mask = 0;
  for (uint32_t a = 0; a < kAssignments; ++a) {
    bool ok = true;
    for (const Clause& c : clauses) {
      if (!c.l.holds(a) && !c.r.holds(a)) {
        ok = false;
        break;
      }
    }
    if (ok) mask |= 1u << a;
  }
  return mask;
}

bool scc_sat(std::span<const Clause> clauses) {
  // Node 2v is x_v, 2v+1 is !x_v. Clause (a | b) adds !a -> b and !b -> a.
  constexpr int n = 2 * kVars;
  std::array<std::vector<int>, n> adj;
  auto node = [](const Literal& l) { return 2 * l.var + (l.neg ? 1 : 0); };
  for (const Clause& c : clauses) {
    const int a = node(c.l);
    const int b = node(c.r);
    adj[static_cast<size_t>(a ^ 1)].push_back(b);
    adj[static_cast<size_t>(b ^ 1)].push_back(a);
  }
  // Tarjan.
  std::array<int, n> index;
  std::array<int, n> low;
  std::array<int, n> comp;
  std::array<bool, n> on_stack{};
  index.fill(-1);
  comp.fill(-1);
  std::vector<int> stack;
  int counter = 0;
  int ncomp = 0;
  std::function<void(int)> strong = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const int w : adj[static_cast<size_t>(v)]) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) strong(v);
  }
  for (int v = 0; v < kVars; ++v) {
    if (comp[2 * v] == comp[2 * v + 1]) return false;
  }
  return true;
}

Tokens tokenize(const Formula& f) {
  Tokens t;
  t.reserve(kContext);
  for (const Clause& c : f) {
    t.push_back(kOpen);
    t.push_back(c.l.token());
    t.push_back(c.r.token());
    t.push_back(kClose);
  }
  t.push_back(kColon);
  return t;
}

Formula detokenize(std::span<const int32_t> tokens) {
  if (static_cast<int>(tokens.size()) != kContext) {
    throw ParseError("expected " + std::to_string(kContext) + " tokens, got " + std::to_string(tokens.size()),
                     static_cast<int>(std::min<size_t>(tokens.size(), kContext)));
  }
  Formula f;
  auto expect = [&](int pos, int32_t want) {
    if (tokens[static_cast<size_t>(pos)] != want) {
      throw ParseError("unexpected token " + std::to_string(tokens[static_cast<size_t>(pos)]), pos);
    }
  };
  auto literal = [&](int pos) {
    const int32_t t = tokens[static_cast<size_t>(pos)];
    if (t < 0 || t >= 2 * kVars) throw ParseError("expected literal, got token " + std::to_string(t), pos);
    return Literal::from_token(t);
  };
  for (int i = 0; i < kClauses; ++i) {
    expect(4 * i, kOpen);
    f[static_cast<size_t>(i)] = Clause{literal(4 * i + 1), literal(4 * i + 2)};
    expect(4 * i + 3, kClose);
  }
  expect(kReadout, kColon);
  return f;
}

namespace {

const std::string kNot = "\xC2\xAC";  // U+00AC

std::string literal_text(const Literal& l) { return (l.neg ? kNot : std::string()) + "x" + std::to_string(l.var); }

}  // namespace

std::string to_string(const Formula& f) {
  std::string s;
  for (const Clause& c : f) s += "(" + literal_text(c.l) + literal_text(c.r) + ")";
  return s + ":";
}

std::string to_line(const Formula& f, bool sat) { return to_string(f) + (sat ? "s" : "u"); }

namespace {

struct TextCursor {
  const std::string& s;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, static_cast<int>(pos)); }
  void expect(char c) {
    if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  Literal literal() {
    bool neg = false;
    if (s.compare(pos, kNot.size(), kNot) == 0) {
      neg = true;
      pos += kNot.size();
    } else if (pos < s.size() && s[pos] == '!') {
      neg = true;
      ++pos;
    }
    expect('x');
    if (pos >= s.size() || s[pos] < '0' || s[pos] >= '0' + kVars) fail("expected variable index");
    const int v = s[pos++] - '0';
    return Literal{v, neg};
  }
};

}  // namespace

Formula parse_formula(const std::string& s) {
  TextCursor c{s};
  Formula f;
  for (int i = 0; i < kClauses; ++i) {
    c.expect('(');
    const Literal l = c.literal();
    const Literal r = c.literal();
    c.expect(')');
    f[static_cast<size_t>(i)] = Clause{l, r};
  }
  c.expect(':');
  if (c.pos != s.size()) c.fail("trailing characters");
  return f;
}

std::pair<Formula, bool> parse_line(const std::string& line) {
  std::string body = line;
  while (!body.empty() && (body.back() == '\r' || body.back() == '\n')) body.pop_back();
  if (body.empty()) throw ParseError("empty line", 0);
  const char label = body.back();
  if (label != 's' && label != 'u') throw ParseError("expected label 's' or 'u'", static_cast<int>(body.size() - 1));
  body.pop_back();
  return {parse_formula(body), label == 's'};
}

uint32_t assignment_from_pattern(const std::string& pattern) {
  if (pattern.size() != kVars) throw std::invalid_argument("assignment pattern must have 5 letters: " + pattern);
  uint32_t a = 0;
  for (int i = 0; i < kVars; ++i) {
    const char ch = pattern[static_cast<size_t>(i)];
    if (ch == 'T') {
      a |= 1u << i;
    } else if (ch != 'F') {
      throw std::invalid_argument("assignment pattern letters must be T or F: " + pattern);
    }
  }
  return a;
}

std::string pattern_of(uint32_t assignment) {
  std::string s(kVars, 'F');
  for (int i = 0; i < kVars; ++i) {
    if ((assignment >> i) & 1u) s[static_cast<size_t>(i)] = 'T';
  }
  return s;
}

}  // namespace axval::sat
