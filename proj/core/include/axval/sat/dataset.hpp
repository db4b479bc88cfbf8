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
#include <random>
#include <string>
#include <vector>

#include "axval/sat/formula.hpp"

namespace axval::sat {

struct Sample {
  Formula formula;
  bool sat = false;
};

struct DatasetStats {
  int64_t attempts = 0;
  int64_t rejected_duplicates = 0;
  // Fraction of clauses of the form (x | !x).
  double tautological_clause_rate = 0.0;
  // Fraction of formulas that repeat a clause (order-insensitive).
  double repeated_clause_formula_rate = 0.0;
};

struct Dataset {
  std::vector<Sample> samples;
  DatasetStats stats;
};

// Exactly `per_label` SAT and `per_label` UNSAT formulas, literals uniform
// i.i.d., duplicate formula strings rejected, shuffled with the same seed.
Dataset generate_dataset(int64_t per_label, uint64_t seed, int64_t max_attempts = 0);

struct Split {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

// Label-balanced split: the first round(frac * per_label) of each label go to train.
Split balanced_split(const std::vector<Sample>& samples, double train_fraction, uint64_t seed);

std::string dataset_text(const std::vector<Sample>& samples);
std::vector<Sample> parse_dataset_text(const std::string& text);
void write_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::vector<Sample> read_dataset(const std::filesystem::path& path);

Formula random_formula(std::mt19937_64& rng);

}  // namespace axval::sat
