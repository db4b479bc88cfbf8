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
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <random>
#include <string>
#include <vector>

#include "axval/nn/adamw.hpp"
#include "axval/nn/graph.hpp"

namespace axval::model {

struct BlockConfig {
  int heads = 1;
  int head_dim = 128;
};

struct ModelConfig {
  std::string task;  // "2sat" or "modadd"
  int vocab = 0;
  int context = 0;
  int d_model = 0;
  int d_mlp = 0;
  std::vector<BlockConfig> blocks;

  int readout() const { return context - 1; }
  void validate() const;
};

ModelConfig twosat_config();
ModelConfig modadd_config(int p = 113);

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct Checkpoint {
  ModelConfig config;
  nn::ParamStore params;
  nlohmann::json metadata = nlohmann::json::object();
};

// Parameter names, in the order documented in README.
std::vector<std::pair<std::string, nn::Shape>> parameter_shapes(const ModelConfig& c);
std::string block_param(int block, const std::string& leaf);

Checkpoint init_checkpoint(const ModelConfig& c, uint64_t seed);
void check_params(const ModelConfig& c, const nn::ParamStore& params);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Attention probabilities captured during a forward pass: per block, per head,
// [B, queries, S] (queries = S for prefix blocks, 1 for the last block).
template <typename T>
struct AttentionTrace {
  std::vector<std::vector<nn::BasicTensor<T>>> probs;
  std::vector<std::vector<nn::BasicTensor<T>>> scores;
};

// Graph-level building blocks shared by training and inference. `p` maps
// parameter names to graph variables.
template <typename T>
struct ModelGraph {
  nn::Graph<T>& g;
  const ModelConfig& config;
  const std::map<std::string, nn::Var>& p;
  AttentionTrace<T>* trace = nullptr;

  // Embedding plus every block but the last, all positions: [B, S, d].
  // `first_mask` replaces the causal mask of block 0.
  nn::Var prefix(const std::vector<int32_t>& tokens, int64_t batch,
                 std::shared_ptr<const nn::AttentionMask> first_mask = nullptr);
  // Last-block attention at the readout position: resid [B, d]; MLP hidden [B, n].
  std::pair<nn::Var, nn::Var> readout_hidden(nn::Var states);
  // MLP output, residual add, unembed: logits [B, V].
  nn::Var logits(nn::Var resid, nn::Var hidden);
  // resid + W_out^T hidden + b_out: [B, d].
  nn::Var mlp_out(nn::Var resid, nn::Var hidden);

 private:
  nn::Var attention(int block, nn::Var x_q, nn::Var x_kv, std::shared_ptr<const nn::AttentionMask> mask);
};

// Concrete components d_t[1], d_t[2], d_t[3] evaluated without a tape.
template <typename T>
class Decomposition {
 public:
  using TensorT = nn::BasicTensor<T>;

  explicit Decomposition(const Checkpoint& ck);

  const ModelConfig& config() const { return config_; }
  const std::map<std::string, TensorT>& params() const { return params_; }

  TensorT embed_prefix(const std::vector<int32_t>& tokens, int64_t batch,
                       std::shared_ptr<const nn::AttentionMask> first_mask = nullptr,
                       AttentionTrace<T>* trace = nullptr) const;
  std::pair<TensorT, TensorT> attend_hidden(const TensorT& states, AttentionTrace<T>* trace = nullptr) const;
  TensorT output_logits(const TensorT& resid, const TensorT& hidden) const;
  // Argmax over the full vocabulary, lowest id on ties.
  std::vector<int32_t> top_token(const TensorT& logits) const;

  TensorT forward_logits(const std::vector<int32_t>& tokens, int64_t batch) const;

 private:
  void check_tokens(const std::vector<int32_t>& tokens, int64_t batch) const;

  ModelConfig config_;
  std::map<std::string, TensorT> params_;
};

// Boundary value of the 2-component split, exposed for splice tests.
template <typename T>
struct Boundary {
  int index = 0;  // 0 tokens, 1 states, 2 (resid, hidden), 3 top tokens
  std::vector<int32_t> tokens;
  nn::BasicTensor<T> states;
  nn::BasicTensor<T> resid;
  nn::BasicTensor<T> hidden;
  std::vector<int32_t> top;
  int64_t batch = 0;
};

template <typename T>
Boundary<T> run_intermediate(const Decomposition<T>& d, const std::vector<int32_t>& tokens, int64_t batch, int i);
template <typename T>
std::vector<int32_t> run_suffix(const Decomposition<T>& d, const Boundary<T>& value, int i);

}  // namespace axval::model
