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

#include "axval/pipeline/config.hpp"

#include <set>

#include "axval/io/container.hpp"

namespace axval::pipeline {

namespace {

void only_keys(const nlohmann::json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <typename V>
void read(const nlohmann::json& j, const char* key, V& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

PipelineConfig default_config(const std::string& task) {
  PipelineConfig c;
  c.task = task;
  if (task == "2sat") {
    c.model = model::twosat_config();
    c.train.epochs = 40;
    c.train.batch_size = 256;
    c.train.optim.weight_decay = 0.1;
  } else if (task == "modadd") {
    c.model = model::modadd_config();
    c.train.epochs = 20000;
    c.train.full_batch = true;
    c.train.batch_size = 4096;
    c.train.optim.weight_decay = 1.0;
    c.train.eval_every = 100;
  } else {
    throw ConfigError("unknown task '" + task + "' (expected 2sat or modadd)");
  }
  return c;
}

void PipelineConfig::check() const {
  if (task != "2sat" && task != "modadd") throw ConfigError("unknown task '" + task + "'");
  if (model.task != task) throw ConfigError("model.task '" + model.task + "' does not match task '" + task + "'");
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (data.train_fraction <= 0.0 || data.train_fraction >= 1.0) throw ConfigError("data.train_fraction must be in (0, 1)");
  if (data.train_per_label <= 0 || data.analysis_per_label <= 0) throw ConfigError("data sizes must be positive");
  if (train.epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (train.batch_size <= 0) throw ConfigError("train.batch_size must be positive");
  if (train.optim.lr <= 0.0) throw ConfigError("train.lr must be positive");
  if (interpret.mode != "dtree" && interpret.mode != "disjunction-only" && interpret.mode != "ideal") {
    throw ConfigError("interpret.mode must be dtree, disjunction-only or ideal");
  }
  if (interpret.max_leaves < 1) throw ConfigError("interpret.max_leaves must be >= 1");
  if (alpha_gamma.mask_variant != "prose" && alpha_gamma.mask_variant != "listing") {
    throw ConfigError("alpha_gamma.mask_variant must be prose or listing");
  }
  if (alpha_gamma.key_freqs != "fixed" && alpha_gamma.key_freqs != "auto") throw ConfigError("alpha_gamma.key_freqs must be fixed or auto");
  if (alpha_gamma.decimals < 0 || alpha_gamma.decimals > 12) throw ConfigError("alpha_gamma.decimals out of range");
  if (validate.confidence <= 0.0 || validate.confidence >= 1.0) throw ConfigError("validate.confidence must be in (0, 1)");
  if (noise.rate < 0.0 || noise.rate > 1.0) throw ConfigError("noise.rate must be in [0, 1]");
  if (noise.n <= 0) throw ConfigError("noise.n must be positive");
}

nlohmann::json PipelineConfig::to_json() const {
  return {
      {"task", task},
      {"seed", seed},
      {"data",
       {{"train_per_label", data.train_per_label},
        {"analysis_per_label", data.analysis_per_label},
        {"train_fraction", data.train_fraction},
        {"train_seed", data.train_seed},
        {"analysis_seed", data.analysis_seed},
        {"modadd_train_fraction", data.modadd_train_fraction}}},
      {"model", model},
      {"train",
       {{"epochs", train.epochs},
        {"batch_size", train.batch_size},
        {"full_batch", train.full_batch},
        {"lr", train.optim.lr},
        {"weight_decay", train.optim.weight_decay},
        {"beta1", train.optim.beta1},
        {"beta2", train.optim.beta2},
        {"eps", train.optim.eps},
        {"eval_every", train.eval_every},
        {"eval_limit", train.eval_limit}}},
      {"interpret",
       {{"mode", interpret.mode},
        {"max_leaves", interpret.max_leaves},
        {"threshold", interpret.threshold},
        {"coeff_threshold", interpret.coeff_threshold},
        {"activity_floor", interpret.activity_floor}}},
      {"alpha_gamma",
       {{"mask_variant", alpha_gamma.mask_variant},
        {"high_activation", alpha_gamma.high_activation},
        {"ridge", alpha_gamma.ridge},
        {"decimals", alpha_gamma.decimals},
        {"key_freqs", alpha_gamma.key_freqs}}},
      {"validate", {{"confidence", validate.confidence}, {"limit", validate.limit}}},
      {"noise", {{"rate", noise.rate}, {"n", noise.n}, {"seed", noise.seed}}},
  };
}

std::string PipelineConfig::hash() const { return io::git_blob_hash(to_json().dump()); }

PipelineConfig config_from_json(const nlohmann::json& j) {
  only_keys(j, "config", {"task", "seed", "data", "model", "train", "interpret", "alpha_gamma", "validate", "noise"});
  std::string task = "2sat";
  read(j, "task", task, "config");
  PipelineConfig c = default_config(task);
  read(j, "seed", c.seed, "config");
  if (j.contains("data")) {
    const auto& d = j["data"];
    only_keys(d, "data", {"train_per_label", "analysis_per_label", "train_fraction", "train_seed", "analysis_seed", "modadd_train_fraction"});
    read(d, "train_per_label", c.data.train_per_label, "data");
    read(d, "analysis_per_label", c.data.analysis_per_label, "data");
    read(d, "train_fraction", c.data.train_fraction, "data");
    read(d, "train_seed", c.data.train_seed, "data");
    read(d, "analysis_seed", c.data.analysis_seed, "data");
    read(d, "modadd_train_fraction", c.data.modadd_train_fraction, "data");
  }
  if (j.contains("model")) {
    try {
      c.model = j["model"].get<model::ModelConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    only_keys(t, "train", {"epochs", "batch_size", "full_batch", "lr", "weight_decay", "beta1", "beta2", "eps", "eval_every", "eval_limit"});
    read(t, "epochs", c.train.epochs, "train");
    read(t, "batch_size", c.train.batch_size, "train");
    read(t, "full_batch", c.train.full_batch, "train");
    read(t, "lr", c.train.optim.lr, "train");
    read(t, "weight_decay", c.train.optim.weight_decay, "train");
    read(t, "beta1", c.train.optim.beta1, "train");
    read(t, "beta2", c.train.optim.beta2, "train");
    read(t, "eps", c.train.optim.eps, "train");
    read(t, "eval_every", c.train.eval_every, "train");
    read(t, "eval_limit", c.train.eval_limit, "train");
  }
  if (j.contains("interpret")) {
    const auto& t = j["interpret"];
    only_keys(t, "interpret", {"mode", "max_leaves", "threshold", "coeff_threshold", "activity_floor"});
    read(t, "mode", c.interpret.mode, "interpret");
    read(t, "max_leaves", c.interpret.max_leaves, "interpret");
    read(t, "threshold", c.interpret.threshold, "interpret");
    read(t, "coeff_threshold", c.interpret.coeff_threshold, "interpret");
    read(t, "activity_floor", c.interpret.activity_floor, "interpret");
  }
  if (j.contains("alpha_gamma")) {
    const auto& t = j["alpha_gamma"];
    only_keys(t, "alpha_gamma", {"mask_variant", "high_activation", "ridge", "decimals", "key_freqs"});
    read(t, "mask_variant", c.alpha_gamma.mask_variant, "alpha_gamma");
    read(t, "high_activation", c.alpha_gamma.high_activation, "alpha_gamma");
    read(t, "ridge", c.alpha_gamma.ridge, "alpha_gamma");
    read(t, "decimals", c.alpha_gamma.decimals, "alpha_gamma");
    read(t, "key_freqs", c.alpha_gamma.key_freqs, "alpha_gamma");
  }
  if (j.contains("validate")) {
    const auto& t = j["validate"];
    only_keys(t, "validate", {"confidence", "limit"});
    read(t, "confidence", c.validate.confidence, "validate");
    read(t, "limit", c.validate.limit, "validate");
  }
  if (j.contains("noise")) {
    const auto& t = j["noise"];
    only_keys(t, "noise", {"rate", "n", "seed"});
    read(t, "rate", c.noise.rate, "noise");
    read(t, "n", c.noise.n, "noise");
    read(t, "seed", c.noise.seed, "noise");
  }
  c.train.seed = c.seed;
  c.check();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace axval::pipeline
