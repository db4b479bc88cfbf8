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
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace axval::axioms {

// Values crossing a boundary are type-erased batches.
using Fn = std::function<std::any(const std::any&)>;
// Per-sample equality of two batches.
using Eq = std::function<std::vector<bool>(const std::any&, const std::any&)>;

enum class Axiom { kPrefixEquivalence = 1, kComponentEquivalence = 2, kPrefixReplaceability = 3, kComponentReplaceability = 4 };

std::string axiom_name(Axiom a);

class AxiomError : public std::runtime_error {
 public:
  AxiomError(Axiom axiom, int component, const std::string& what);
  Axiom axiom() const { return axiom_; }
  int component() const { return component_; }

 private:
  Axiom axiom_;
  int component_;
};

// Components are 1-indexed in reports: concrete[i - 1] is d_t[i].
struct Bundle {
  std::vector<Fn> concrete;  // L
  std::vector<Fn> abstract;  // L
  std::vector<Fn> alpha;     // L + 1, alpha[0] acts on inputs
  std::vector<Fn> gamma;     // L + 1
  std::vector<Eq> abstract_equal;       // L + 1, per boundary
  std::vector<std::string> equality_mode;  // L + 1, reported
  Eq output_equal;           // final concrete outputs

  size_t length() const { return concrete.size(); }
  void validate() const;
};

struct Counts {
  int64_t n = 0;
  int64_t violations = 0;
};

// counts[axiom - 1][component - 1]
using CountTable = std::vector<std::array<Counts, 4>>;

// Streams batches until `next` returns nothing; all four axioms for every
// component in one pass.
CountTable run_axioms(const Bundle& bundle, const std::function<std::optional<std::any>()>& next);
CountTable run_axioms(const Bundle& bundle, const std::vector<std::any>& batches);

Counts check_axiom(Axiom kind, const Bundle& bundle, int i, const std::vector<std::any>& batches);

struct AxiomEntry {
  int axiom = 0;
  int component = 0;
  int64_t n = 0;
  int64_t violations = 0;
  double epsilon_hat = 0.0;
  double epsilon_upper_95 = 0.0;
  std::string equality_mode;
};

struct AxiomReport {
  std::vector<AxiomEntry> entries;
  std::string config_hash;
  std::string dataset_hash;
  uint64_t seed = 0;
  double confidence = 0.95;

  const AxiomEntry& at(Axiom a, int component) const;
  nlohmann::json to_json() const;
  static AxiomReport from_json(const nlohmann::json& j);
};

AxiomReport make_report(const Bundle& bundle, const CountTable& counts, double confidence = 0.95);

}  // namespace axval::axioms
