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

#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "axval/interp/operators.hpp"
#include "axval/pipeline/config.hpp"

namespace axval::pipeline {

class MissingArtifact : public std::runtime_error {
 public:
  explicit MissingArtifact(const std::filesystem::path& p)
      : std::runtime_error("missing artifact: " + p.string()), path_(p) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

using Logger = std::function<void(const std::string&)>;

struct StageContext {
  PipelineConfig config;
  std::filesystem::path out;
  bool force = false;
  Logger log = [](const std::string&) {};
};

// Each stage reads earlier artifacts under ctx.out, writes its own
// subdirectory and a manifest.json there, and returns the manifest.
nlohmann::json gen_data(const StageContext& ctx);
nlohmann::json train(const StageContext& ctx);
nlohmann::json analyze(const StageContext& ctx);
nlohmann::json interpret(const StageContext& ctx);
nlohmann::json validate(const StageContext& ctx);
nlohmann::json noise_experiment(const StageContext& ctx);
nlohmann::json report(const StageContext& ctx);

// Operators written by the analysis stage of a 2-SAT run.
interp::TwoSatOperators load_twosat_operators(const StageContext& ctx);

// Published values for side-by-side comparison in reports.
nlohmann::json published_reference();

}  // namespace axval::pipeline
