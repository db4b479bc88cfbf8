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

#include "axval/axioms/engine.hpp"

#include <sstream>

#include "axval/stats/binomial.hpp"

namespace axval::axioms {

std::string axiom_name(Axiom a) {
  switch (a) {
    case Axiom::kPrefixEquivalence: return "prefix-equivalence";
    case Axiom::kComponentEquivalence: return "component-equivalence";
    case Axiom::kPrefixReplaceability: return "prefix-replaceability";
    case Axiom::kComponentReplaceability: return "component-replaceability";
  }
  return "unknown";
}

namespace {

std::string axiom_message(Axiom axiom, int component, const std::string& what) {
  std::ostringstream m;
  m << axiom_name(axiom) << " at component " << component << ": " << what;
  return m.str();
}

}  // namespace

AxiomError::AxiomError(Axiom axiom, int component, const std::string& what)
    : std::runtime_error(axiom_message(axiom, component, what)),
      axiom_(axiom),
      component_(component) {}

void Bundle::validate() const {
  const size_t l = concrete.size();
  auto fail = [](const std::string& m) { throw std::invalid_argument("bundle: " + m); };
  if (l == 0) fail("no components");
  if (abstract.size() != l) fail("len(d_t) != len(d_h)");
  if (alpha.size() != l + 1 || gamma.size() != l + 1) fail("expected L + 1 alpha and gamma operators");
  if (abstract_equal.size() != l + 1) fail("expected L + 1 equality predicates");
  if (!output_equal) fail("missing output equality");
}

namespace {

template <typename F>
auto guarded(Axiom a, int i, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::bad_any_cast& e) {
    throw AxiomError(a, i, std::string("boundary type mismatch (") + e.what() + ")");
  }
}

void tally(Counts& c, const std::vector<bool>& eq, Axiom a, int i, size_t expected) {
  if (eq.size() != expected) {
    throw AxiomError(a, i, "equality predicate returned " + std::to_string(eq.size()) + " results for a batch of " +
                               std::to_string(expected));
  }
  c.n += static_cast<int64_t>(eq.size());
  for (const bool e : eq) c.violations += e ? 0 : 1;
}

}  // namespace

CountTable run_axioms(const Bundle& b, const std::function<std::optional<std::any>()>& next) {
  b.validate();
  const int l = static_cast<int>(b.length());
  CountTable table(static_cast<size_t>(l));
  while (auto batch = next()) {
    const std::any& x = *batch;
    // Concrete pass c[0..L] and the reference outputs.
    std::vector<std::any> c(static_cast<size_t>(l + 1));
    c[0] = x;
    for (int i = 1; i <= l; ++i) {
      c[static_cast<size_t>(i)] = guarded(Axiom::kPrefixEquivalence, i, [&] { return b.concrete[static_cast<size_t>(i - 1)](c[static_cast<size_t>(i - 1)]); });
    }
    const std::any& t_out = c[static_cast<size_t>(l)];
    const size_t count = b.output_equal(t_out, t_out).size();
    // Abstract prefix hp[i] = d_h[:i](alpha_0(x)); abstractions a[i] = alpha_i(c[i]).
    std::vector<std::any> hp(static_cast<size_t>(l + 1));
    std::vector<std::any> a(static_cast<size_t>(l + 1));
    hp[0] = guarded(Axiom::kPrefixEquivalence, 1, [&] { return b.alpha[0](x); });
    a[0] = hp[0];
    for (int i = 1; i <= l; ++i) {
      const auto si = static_cast<size_t>(i);
      hp[si] = guarded(Axiom::kPrefixEquivalence, i, [&] { return b.abstract[si - 1](hp[si - 1]); });
      a[si] = guarded(Axiom::kPrefixEquivalence, i, [&] { return b.alpha[si](c[si]); });
    }
    auto suffix = [&](int i, std::any v) {
      for (int j = i + 1; j <= l; ++j) v = b.concrete[static_cast<size_t>(j - 1)](v);
      return v;
    };
    for (int i = 1; i <= l; ++i) {
      const auto si = static_cast<size_t>(i);
      auto& row = table[si - 1];
      // prefix equivalence
      guarded(Axiom::kPrefixEquivalence, i, [&] {
        tally(row[0], b.abstract_equal[si](a[si], hp[si]), Axiom::kPrefixEquivalence, i, count);
        return 0;
      });
      // component equivalence
      const std::any hc = i == 1 ? hp[1] : guarded(Axiom::kComponentEquivalence, i, [&] { return b.abstract[si - 1](a[si - 1]); });
      guarded(Axiom::kComponentEquivalence, i, [&] {
        tally(row[1], b.abstract_equal[si](a[si], hc), Axiom::kComponentEquivalence, i, count);
        return 0;
      });
      // prefix replaceability
      guarded(Axiom::kPrefixReplaceability, i, [&] {
        const std::any out = suffix(i, b.gamma[si](hp[si]));
        tally(row[2], b.output_equal(t_out, out), Axiom::kPrefixReplaceability, i, count);
        return 0;
      });
      // component replaceability
      guarded(Axiom::kComponentReplaceability, i, [&] {
        const std::any out = suffix(i, b.gamma[si](hc));
        tally(row[3], b.output_equal(t_out, out), Axiom::kComponentReplaceability, i, count);
        return 0;
      });
    }
  }
  return table;
}

CountTable run_axioms(const Bundle& bundle, const std::vector<std::any>& batches) {
  size_t k = 0;
  return run_axioms(bundle, [&]() -> std::optional<std::any> {
    if (k == batches.size()) return std::nullopt;
    return batches[k++];
  });
}

Counts check_axiom(Axiom kind, const Bundle& bundle, int i, const std::vector<std::any>& batches) {
  if (i < 1 || i > static_cast<int>(bundle.length())) {
    throw AxiomError(kind, i, "component index outside [1, " + std::to_string(bundle.length()) + "]");
  }
  const CountTable t = run_axioms(bundle, batches);
  return t[static_cast<size_t>(i - 1)][static_cast<size_t>(static_cast<int>(kind) - 1)];
}

const AxiomEntry& AxiomReport::at(Axiom a, int component) const {
  for (const auto& e : entries) {
    if (e.axiom == static_cast<int>(a) && e.component == component) return e;
  }
  throw std::out_of_range("no report entry for " + axiom_name(a) + " component " + std::to_string(component));
}

nlohmann::json AxiomReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back({{"axiom", e.axiom},
                    {"component", e.component},
                    {"n", e.n},
                    {"violations", e.violations},
                    {"epsilon_hat", e.epsilon_hat},
                    {"epsilon_upper_95", e.epsilon_upper_95},
                    {"equality_mode", e.equality_mode}});
  }
  return {{"schema", "axval.axiom_report.v1"},
          {"config_hash", config_hash},
          {"dataset_hash", dataset_hash},
          {"seed", seed},
          {"confidence", confidence},
          {"entries", rows}};
}

AxiomReport AxiomReport::from_json(const nlohmann::json& j) {
  AxiomReport r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.dataset_hash = j.at("dataset_hash").get<std::string>();
  r.seed = j.at("seed").get<uint64_t>();
  r.confidence = j.at("confidence").get<double>();
  for (const auto& e : j.at("entries")) {
    r.entries.push_back(AxiomEntry{e.at("axiom").get<int>(), e.at("component").get<int>(), e.at("n").get<int64_t>(),
                                   e.at("violations").get<int64_t>(), e.at("epsilon_hat").get<double>(),
                                   e.at("epsilon_upper_95").get<double>(), e.at("equality_mode").get<std::string>()});
  }
  return r;
}

AxiomReport make_report(const Bundle& bundle, const CountTable& counts, double confidence) {
  AxiomReport r;
  r.confidence = confidence;
  for (int ax = 1; ax <= 4; ++ax) {
    for (size_t i = 0; i < counts.size(); ++i) {
      const Counts& c = counts[i][static_cast<size_t>(ax - 1)];
      AxiomEntry e;
      e.axiom = ax;
      e.component = static_cast<int>(i + 1);
      e.n = c.n;
      e.violations = c.violations;
      e.epsilon_hat = c.n > 0 ? static_cast<double>(c.violations) / static_cast<double>(c.n) : 0.0;
      e.epsilon_upper_95 = c.n > 0 ? stats::clopper_pearson_upper(c.violations, c.n, confidence) : 1.0;
      // Equivalence axioms compare abstract states at boundary i; replaceability compares outputs.
      if (ax <= 2) {
        e.equality_mode = i + 1 < bundle.equality_mode.size() ? bundle.equality_mode[i + 1] : "exact";
      } else {
        e.equality_mode = "output";
      }
      r.entries.push_back(e);
    }
  }
  return r;
}

}  // namespace axval::axioms
