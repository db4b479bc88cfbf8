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

#include <CLI11.hpp>
#include <fmt/core.h>
#include <malloc.h>

#include <cstdio>
#include <functional>
#include <map>

#include "axval/io/container.hpp"
#include "axval/nn/tensor.hpp"
#include "axval/pipeline/stages.hpp"
#include "axval/sat/formula.hpp"

namespace {

using namespace axval;
using Stage = std::function<nlohmann::json(const pipeline::StageContext&)>;

enum Exit { kOk = 0, kConfig = 2, kMissing = 3, kNumerical = 4, kOther = 1 };

}  // namespace

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);

  CLI::App app{"axval: train small transformers and validate abstract interpretations of them"};
  app.require_subcommand(1);
  std::string task = "2sat";
  std::string config_path;
  std::string out = "runs/default";
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> mask_variant;
  std::optional<int> epochs;
  std::optional<int64_t> limit;
  bool force = false;
  bool quiet = false;

  const std::vector<std::pair<std::string, Stage>> stages = {
      {"gen-data", pipeline::gen_data},   {"train", pipeline::train},       {"analyze", pipeline::analyze},
      {"interpret", pipeline::interpret}, {"validate", pipeline::validate}, {"noise-experiment", pipeline::noise_experiment},
      {"report", pipeline::report},
  };
  const std::map<std::string, std::string> help = {
      {"gen-data", "generate datasets"},
      {"train", "train the model (resumes from model/train_state.axv)"},
      {"analyze", "attention, sparsity and alpha/gamma operator fitting"},
      {"interpret", "fit neuron interpretations"},
      {"validate", "estimate axiom violation rates"},
      {"noise-experiment", "rerun validation with a noisy abstract parser"},
      {"report", "collect summaries beside reference values"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : stages) subs.push_back(app.add_subcommand(name, help.at(name)));
  subs.push_back(app.add_subcommand("run", "run every stage in order"));
  for (CLI::App* s : subs) {
    s->add_option("--task", task, "2sat or modadd")->check(CLI::IsMember({"2sat", "modadd"}));
    s->add_option("--config", config_path, "JSON config file");
    s->add_option("--out", out, "artifact directory");
    s->add_option("--seed", seed, "global seed");
    s->add_option("--mode", mode, "dtree, disjunction-only or ideal");
    s->add_option("--mask-variant", mask_variant, "prose or listing");
    s->add_option("--epochs", epochs, "training epochs");
    s->add_option("--limit", limit, "validation formula limit");
    s->add_flag("--force", force, "accept upstream artifacts from a different config");
    s->add_flag("--quiet", quiet, "suppress progress logging");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    pipeline::StageContext ctx;
    ctx.config = config_path.empty() ? pipeline::default_config(task) : pipeline::load_config(config_path);
    if (!config_path.empty() && app.get_subcommands().front()->count("--task") > 0 && ctx.config.task != task) {
      throw pipeline::ConfigError("--task " + task + " conflicts with config task " + ctx.config.task);
    }
    if (seed) ctx.config.seed = *seed;
    if (mode) ctx.config.interpret.mode = *mode;
    if (mask_variant) ctx.config.alpha_gamma.mask_variant = *mask_variant;
    if (epochs) ctx.config.train.epochs = *epochs;
    if (limit) ctx.config.validate.limit = *limit;
    ctx.config.check();
    ctx.out = out;
    ctx.force = force;
    if (!quiet) {
      ctx.log = [](const std::string& m) {
        fmt::print(stderr, "{}\n", m);
        std::fflush(stderr);
      };
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    for (const auto& [name, fn] : stages) {
      if (cmd != "run" && cmd != name) continue;
      if (cmd == "run" && name == "noise-experiment" && ctx.config.task != "2sat") continue;
      ctx.log("== " + name);
      fn(ctx);
    }
    return kOk;
  } catch (const pipeline::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const sat::ParseError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const pipeline::MissingArtifact& e) {
    fmt::print(stderr, "{}\n", e.what());
    return kMissing;
  } catch (const io::FormatError& e) {
    fmt::print(stderr, "artifact error: {}\n", e.what());
    return kMissing;
  } catch (const nn::NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kOther;
  }
}
