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

#include "axval/sat/dataset.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "axval/io/container.hpp"

namespace axval::sat {

Formula random_formula(std::mt19937_64& rng) {
  std::uniform_int_distribution<int32_t> lit(0, 2 * kVars - 1);
  Formula f;
  for (auto& c : f) {
    c.l = Literal::from_token(lit(rng));
    c.r = Literal::from_token(lit(rng));
  }
  return f;
}

Dataset generate_dataset(int64_t per_label, uint64_t seed, int64_t max_attempts) {
  if (per_label < 0) throw std::invalid_argument("negative per-label count");
  if (max_attempts <= 0) max_attempts = 100 * per_label + 100000;
  std::mt19937_64 rng(seed);
  std::unordered_set<std::string> seen;
  std::vector<Sample> sat_bucket;
  std::vector<Sample> unsat_bucket;
  Dataset ds;
  while (static_cast<int64_t>(sat_bucket.size()) < per_label || static_cast<int64_t>(unsat_bucket.size()) < per_label) {
    if (ds.stats.attempts >= max_attempts) {
      throw std::runtime_error("dataset generation exhausted " + std::to_string(max_attempts) + " attempts with " +
                               std::to_string(sat_bucket.size()) + " SAT and " + std::to_string(unsat_bucket.size()) +
                               " UNSAT formulas");
    }
    ++ds.stats.attempts;
    const Formula f = random_formula(rng);
    const bool sat = scc_sat(f);
    auto& bucket = sat ? sat_bucket : unsat_bucket;
    if (static_cast<int64_t>(bucket.size()) >= per_label) continue;
    if (!seen.insert(to_string(f)).second) {
      ++ds.stats.rejected_duplicates;
      continue;
    }
    bucket.push_back(Sample{f, sat});
  }
  ds.samples = std::move(sat_bucket);
  ds.samples.insert(ds.samples.end(), unsat_bucket.begin(), unsat_bucket.end());
  std::shuffle(ds.samples.begin(), ds.samples.end(), rng);

  int64_t taut = 0;
  int64_t repeated = 0;
  for (const Sample& s : ds.samples) {
    bool rep = false;
    for (size_t i = 0; i < s.formula.size(); ++i) {
      const Clause& c = s.formula[i];
      if (c.l.var == c.r.var && c.l.neg != c.r.neg) ++taut;
      for (size_t j = 0; j < i; ++j) rep = rep || c.same_unordered(s.formula[j]);
    }
    if (rep) ++repeated;
  }
  if (!ds.samples.empty()) {
    const auto n = static_cast<double>(ds.samples.size());
    ds.stats.tautological_clause_rate = static_cast<double>(taut) / (n * kClauses);
    ds.stats.repeated_clause_formula_rate = static_cast<double>(repeated) / n;
  }
  return ds;
}

Split balanced_split(const std::vector<Sample>& samples, double train_fraction, uint64_t seed) {
  if (train_fraction < 0.0 || train_fraction > 1.0) throw std::invalid_argument("train fraction outside [0, 1]");
  std::vector<Sample> pos;
  std::vector<Sample> neg;
  for (const Sample& s : samples) (s.sat ? pos : neg).push_back(s);
  Split out;
  for (auto* bucket : {&pos, &neg}) {
    const auto k = static_cast<size_t>(std::llround(train_fraction * static_cast<double>(bucket->size())));
    out.train.insert(out.train.end(), bucket->begin(), bucket->begin() + static_cast<long>(k));
    out.test.insert(out.test.end(), bucket->begin() + static_cast<long>(k), bucket->end());
  }
  std::mt19937_64 rng(seed);
  std::shuffle(out.train.begin(), out.train.end(), rng);
  std::shuffle(out.test.begin(), out.test.end(), rng);
  return out;
}

std::string dataset_text(const std::vector<Sample>& samples) {
  std::string out;
  out.reserve(samples.size() * 64);
  for (const Sample& s : samples) {
    out += to_line(s.formula, s.sat);
    out += '\n';
  }
  return out;
}

std::vector<Sample> parse_dataset_text(const std::string& text) {
  std::vector<Sample> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto [f, sat] = parse_line(line);
      out.push_back(Sample{f, sat});
    } catch (const ParseError& e) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  io::write_file(path, dataset_text(samples));
}

std::vector<Sample> read_dataset(const std::filesystem::path& path) { return parse_dataset_text(io::read_file(path)); }

}  // namespace axval::sat
