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
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "axval/model/train.hpp"

namespace axval::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  int64_t train_per_label = 166667;     // training corpus
  int64_t analysis_per_label = 100000;  // analysis dataset
  double train_fraction = 0.6;
  uint64_t train_seed = 1;
  uint64_t analysis_seed = 2;
  double modadd_train_fraction = 0.3;
};

struct InterpretConfig {
  std::string mode = "dtree";  // dtree | disjunction-only | ideal
  int max_leaves = 4;
  double threshold = 0.5;
  double coeff_threshold = 1e-6;
  double activity_floor = 0.01;
};

struct AlphaGammaConfig {
  std::string mask_variant = "prose";  // prose | listing
  double high_activation = 2.0;
  double ridge = 1e-6;
  int decimals = 3;
  std::string key_freqs = "fixed";  // fixed | auto
};

struct ValidateConfig {
  double confidence = 0.95;
  int64_t limit = 0;  // 0 uses the whole analysis test split
};

struct NoiseConfig {
  double rate = 0.01;
  int64_t n = 10000;
  uint64_t seed = 7;
};

struct PipelineConfig {
  std::string task = "2sat";
  uint64_t seed = 0;
  DataConfig data;
  model::ModelConfig model;
  model::TrainConfig train;
  InterpretConfig interpret;
  AlphaGammaConfig alpha_gamma;
  ValidateConfig validate;
  NoiseConfig noise;

  void check() const;
  nlohmann::json to_json() const;
  // git blob hash of the canonical JSON dump.
  std::string hash() const;
};

PipelineConfig default_config(const std::string& task);
// Unknown keys are rejected; missing keys keep defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace axval::pipeline
