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

#include "axval/model/transformer.hpp"

#include <cmath>

#include "axval/io/container.hpp"

namespace axval::model {

using nn::Shape;
using nn::Var;

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("model config: " + m); };
  if (task != "2sat" && task != "modadd") fail("unknown task '" + task + "'");
  if (vocab <= 0 || context <= 0 || d_model <= 0 || d_mlp <= 0) fail("sizes must be positive");
  if (blocks.empty()) fail("at least one block required");
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].heads * blocks[b].head_dim != d_model) {
      fail("block " + std::to_string(b) + ": heads * head_dim != d_model");
    }
  }
}

ModelConfig twosat_config() {
  ModelConfig c;
  c.task = "2sat";
  c.vocab = 15;
  c.context = 41;
  c.d_model = 128;
  c.d_mlp = 512;
  c.blocks = {BlockConfig{1, 128}, BlockConfig{4, 32}};
  return c;
}

ModelConfig modadd_config(int p) {
  ModelConfig c;
  c.task = "modadd";
  c.vocab = p + 1;
  c.context = 3;
  c.d_model = 128;
  c.d_mlp = 512;
  c.blocks = {BlockConfig{4, 32}};
  return c;
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"task", c.task}, {"vocab", c.vocab}, {"context", c.context}, {"d_model", c.d_model},
                     {"d_mlp", c.d_mlp}};
  auto blocks = nlohmann::json::array();
  for (const auto& b : c.blocks) blocks.push_back({{"heads", b.heads}, {"head_dim", b.head_dim}});
  j["blocks"] = blocks;
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.task = j.at("task").get<std::string>();
  c.vocab = j.at("vocab").get<int>();
  c.context = j.at("context").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.d_mlp = j.at("d_mlp").get<int>();
  c.blocks.clear();
  for (const auto& b : j.at("blocks")) c.blocks.push_back(BlockConfig{b.at("heads").get<int>(), b.at("head_dim").get<int>()});
}

std::string block_param(int block, const std::string& leaf) { return "blocks." + std::to_string(block) + "." + leaf; }

std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& c) {
  const int64_t d = c.d_model;
  const int64_t n = c.d_mlp;
  std::vector<std::pair<std::string, Shape>> out = {
      {"embed.W_E", {c.vocab, d}},
      {"embed.W_pos", {c.context, d}},
  };
  for (int b = 0; b < static_cast<int>(c.blocks.size()); ++b) {
    const int64_t hd = static_cast<int64_t>(c.blocks[static_cast<size_t>(b)].heads) * c.blocks[static_cast<size_t>(b)].head_dim;
    out.emplace_back(block_param(b, "attn.W_Q"), Shape{d, hd});
    out.emplace_back(block_param(b, "attn.W_K"), Shape{d, hd});
    out.emplace_back(block_param(b, "attn.W_V"), Shape{d, hd});
    out.emplace_back(block_param(b, "attn.W_O"), Shape{hd, d});
    out.emplace_back(block_param(b, "mlp.W_in"), Shape{d, n});
    out.emplace_back(block_param(b, "mlp.b_in"), Shape{n});
    out.emplace_back(block_param(b, "mlp.W_out"), Shape{n, d});
    out.emplace_back(block_param(b, "mlp.b_out"), Shape{d});
  }
  out.emplace_back("unembed.W_U", Shape{d, c.vocab});
  return out;
}

Checkpoint init_checkpoint(const ModelConfig& c, uint64_t seed) {
  c.validate();
  Checkpoint ck;
  ck.config = c;
  std::mt19937_64 rng(seed);
  for (const auto& [name, shape] : parameter_shapes(c)) {
    nn::Tensor t(shape);
    const bool bias = name.find(".b_") != std::string::npos;
    if (!bias) {
      const bool embed = name.rfind("embed.", 0) == 0;
      const double std = embed ? 0.02 : 1.0 / std::sqrt(static_cast<double>(shape[0]));
      std::normal_distribution<double> dist(0.0, std);
      for (auto& x : t.storage()) x = static_cast<float>(dist(rng));
    }
    ck.params.emplace(name, std::move(t));
  }
  ck.metadata["init_seed"] = seed;
  return ck;
}

void check_params(const ModelConfig& c, const nn::ParamStore& params) {
  const auto shapes = parameter_shapes(c);
  if (shapes.size() != params.size()) {
    throw nn::ShapeError("checkpoint", "expected " + std::to_string(shapes.size()) + " parameters, found " +
                                           std::to_string(params.size()));
  }
  for (const auto& [name, shape] : shapes) {
    const auto it = params.find(name);
    if (it == params.end()) throw nn::ShapeError("checkpoint", "missing parameter " + name);
    if (it->second.shape() != shape) throw nn::ShapeError("checkpoint " + name, shape, it->second.shape());
  }
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  io::Container c;
  c.manifest["kind"] = "checkpoint";
  c.manifest["config"] = ck.config;
  c.manifest["metadata"] = ck.metadata;
  c.f32 = ck.params;
  io::save(c, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  io::Container c = io::load(path);
  if (c.manifest.value("kind", "") != "checkpoint") throw io::FormatError(path.string() + " is not a checkpoint");
  Checkpoint ck;
  ck.config = c.manifest.at("config").get<ModelConfig>();
  ck.metadata = c.manifest.value("metadata", nlohmann::json::object());
  for (auto& [name, t] : c.f32) {
    if (name.rfind("optim.", 0) != 0) ck.params.emplace(name, std::move(t));
  }
  ck.config.validate();
  check_params(ck.config, ck.params);
  return ck;
}

template <typename T>
Var ModelGraph<T>::attention(int block, Var x_q, Var x_kv, std::shared_ptr<const nn::AttentionMask> mask) {
  const BlockConfig& bc = config.blocks[static_cast<size_t>(block)];
  const Var q = g.matmul(x_q, p.at(block_param(block, "attn.W_Q")));
  const Var k = g.matmul(x_kv, p.at(block_param(block, "attn.W_K")));
  const Var v = g.matmul(x_kv, p.at(block_param(block, "attn.W_V")));
  const T scale = T(1) / std::sqrt(static_cast<T>(bc.head_dim));
  std::vector<Var> zs;
  if (trace) {
    trace->probs.emplace_back();
    trace->scores.emplace_back();
  }
  for (int h = 0; h < bc.heads; ++h) {
    const Var qh = bc.heads == 1 ? q : g.slice(q, 2, h * bc.head_dim, (h + 1) * bc.head_dim);
    const Var kh = bc.heads == 1 ? k : g.slice(k, 2, h * bc.head_dim, (h + 1) * bc.head_dim);
    const Var vh = bc.heads == 1 ? v : g.slice(v, 2, h * bc.head_dim, (h + 1) * bc.head_dim);
    const Var scores = g.scale(g.bmm(qh, kh, false, true), scale);
    const Var probs = g.softmax(scores, mask);
    if (trace) {
      trace->scores.back().push_back(g.value(scores));
      trace->probs.back().push_back(g.value(probs));
    }
    zs.push_back(g.bmm(probs, vh));
  }
  const Var z = zs.size() == 1 ? zs.front() : g.concat(zs, 2);
  return g.matmul(z, p.at(block_param(block, "attn.W_O")));
}

template <typename T>
Var ModelGraph<T>::prefix(const std::vector<int32_t>& tokens, int64_t batch,
                          std::shared_ptr<const nn::AttentionMask> first_mask) {
  const int64_t s = config.context;
  const int64_t d = config.d_model;
  Var x = g.reshape(g.embedding(p.at("embed.W_E"), tokens), {batch, s, d});
  x = g.add_broadcast(x, p.at("embed.W_pos"));
  const auto causal = std::make_shared<const nn::AttentionMask>(nn::AttentionMask::causal(s));
  const int last = static_cast<int>(config.blocks.size()) - 1;
  for (int b = 0; b < last; ++b) {
    const auto mask = (b == 0 && first_mask) ? first_mask : causal;
    x = g.add(x, attention(b, x, x, mask));
    const Var pre = g.add_broadcast(g.matmul(x, p.at(block_param(b, "mlp.W_in"))), p.at(block_param(b, "mlp.b_in")));
    const Var hid = g.relu(pre);
    const Var out = g.add_broadcast(g.matmul(hid, p.at(block_param(b, "mlp.W_out"))), p.at(block_param(b, "mlp.b_out")));
    x = g.add(x, out);
  }
  return x;
}

template <typename T>
std::pair<Var, Var> ModelGraph<T>::readout_hidden(Var states) {
  const int last = static_cast<int>(config.blocks.size()) - 1;
  const int64_t r = config.readout();
  const int64_t batch = g.shape(states)[0];
  const int64_t d = config.d_model;
  const Var xr = g.slice(states, 1, r, r + 1);
  const Var attn = attention(last, xr, states, nullptr);
  const Var resid = g.reshape(g.add(xr, attn), {batch, d});
  const Var pre = g.add_broadcast(g.matmul(resid, p.at(block_param(last, "mlp.W_in"))), p.at(block_param(last, "mlp.b_in")));
  return {resid, g.relu(pre)};
}

template <typename T>
Var ModelGraph<T>::mlp_out(Var resid, Var hidden) {
  const int last = static_cast<int>(config.blocks.size()) - 1;
  const Var out = g.add_broadcast(g.matmul(hidden, p.at(block_param(last, "mlp.W_out"))), p.at(block_param(last, "mlp.b_out")));
  return g.add(resid, out);
}

template <typename T>
Var ModelGraph<T>::logits(Var resid, Var hidden) {
  return g.matmul(mlp_out(resid, hidden), p.at("unembed.W_U"));
}

template <typename T>
Decomposition<T>::Decomposition(const Checkpoint& ck) : config_(ck.config) {
  config_.validate();
  check_params(config_, ck.params);
  for (const auto& [name, t] : ck.params) params_.emplace(name, t.template cast<T>());
}

namespace {

template <typename T>
std::map<std::string, Var> bind(nn::Graph<T>& g, const std::map<std::string, nn::BasicTensor<T>>& params) {
  std::map<std::string, Var> out;
  for (const auto& [name, t] : params) out.emplace(name, g.constant(t));
  return out;
}

}  // namespace

template <typename T>
void Decomposition<T>::check_tokens(const std::vector<int32_t>& tokens, int64_t batch) const {
  if (static_cast<int64_t>(tokens.size()) != batch * config_.context) {
    throw nn::ShapeError("forward", "expected " + std::to_string(batch) + " x " + std::to_string(config_.context) +
                                        " tokens, got " + std::to_string(tokens.size()));
  }
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || tokens[i] >= config_.vocab) {
      throw std::out_of_range("token id " + std::to_string(tokens[i]) + " at index " + std::to_string(i) +
                              " outside vocabulary of size " + std::to_string(config_.vocab));
    }
  }
}

template <typename T>
typename Decomposition<T>::TensorT Decomposition<T>::embed_prefix(const std::vector<int32_t>& tokens, int64_t batch,
                                                                  std::shared_ptr<const nn::AttentionMask> first_mask,
                                                                  AttentionTrace<T>* trace) const {
  check_tokens(tokens, batch);
  nn::Graph<T> g(false);
  const auto p = bind(g, params_);
  ModelGraph<T> m{g, config_, p, trace};
  return g.value(m.prefix(tokens, batch, std::move(first_mask)));
}

template <typename T>
std::pair<typename Decomposition<T>::TensorT, typename Decomposition<T>::TensorT> Decomposition<T>::attend_hidden(
    const TensorT& states, AttentionTrace<T>* trace) const {
  if (states.rank() != 3 || states.dim(1) != config_.context || states.dim(2) != config_.d_model) {
    throw nn::ShapeError("attend_hidden", states.shape(), Shape{-1, config_.context, config_.d_model});
  }
  nn::Graph<T> g(false);
  const auto p = bind(g, params_);
  ModelGraph<T> m{g, config_, p, trace};
  const auto [resid, hidden] = m.readout_hidden(g.constant(states));
  return {g.value(resid), g.value(hidden)};
}

template <typename T>
typename Decomposition<T>::TensorT Decomposition<T>::output_logits(const TensorT& resid, const TensorT& hidden) const {
  if (resid.rank() != 2 || resid.dim(1) != config_.d_model) throw nn::ShapeError("output_logits", resid.shape(), Shape{-1, config_.d_model});
  if (hidden.rank() != 2 || hidden.dim(1) != config_.d_mlp || hidden.dim(0) != resid.dim(0)) {
    throw nn::ShapeError("output_logits", hidden.shape(), Shape{resid.dim(0), config_.d_mlp});
  }
  nn::Graph<T> g(false);
  const auto p = bind(g, params_);
  ModelGraph<T> m{g, config_, p, nullptr};
  return g.value(m.logits(g.constant(resid), g.constant(hidden)));
}

template <typename T>
std::vector<int32_t> Decomposition<T>::top_token(const TensorT& logits) const {
  const int64_t v = logits.dim(-1);
  const int64_t n = logits.numel() / v;
  std::vector<int32_t> out(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    const auto row = logits.row(i);
    out[static_cast<size_t>(i)] = static_cast<int32_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

template <typename T>
typename Decomposition<T>::TensorT Decomposition<T>::forward_logits(const std::vector<int32_t>& tokens, int64_t batch) const {
  const auto states = embed_prefix(tokens, batch);
  const auto [resid, hidden] = attend_hidden(states);
  return output_logits(resid, hidden);
}

template <typename T>
Boundary<T> run_intermediate(const Decomposition<T>& d, const std::vector<int32_t>& tokens, int64_t batch, int i) {
  if (i < 0 || i > 3) throw std::out_of_range("boundary index " + std::to_string(i) + " outside [0, 3]");
  Boundary<T> b;
  b.index = i;
  b.batch = batch;
  if (i == 0) {
    b.tokens = tokens;
    return b;
  }
  b.states = d.embed_prefix(tokens, batch);
  if (i == 1) return b;
  std::tie(b.resid, b.hidden) = d.attend_hidden(b.states);
  b.states = {};
  if (i == 2) return b;
  b.top = d.top_token(d.output_logits(b.resid, b.hidden));
  b.resid = {};
  b.hidden = {};
  return b;
}

template <typename T>
std::vector<int32_t> run_suffix(const Decomposition<T>& d, const Boundary<T>& value, int i) {
  if (value.index != i) {
    throw std::invalid_argument("boundary value from index " + std::to_string(value.index) + " passed to suffix " + std::to_string(i));
  }
  switch (i) {
    case 0:
      return d.top_token(d.forward_logits(value.tokens, value.batch));
    case 1: {
      const auto [resid, hidden] = d.attend_hidden(value.states);
      return d.top_token(d.output_logits(resid, hidden));
    }
    case 2:
      return d.top_token(d.output_logits(value.resid, value.hidden));
    case 3:
      return value.top;
    default:
      throw std::out_of_range("boundary index " + std::to_string(i) + " outside [0, 3]");
  }
}

template struct ModelGraph<float>;
template struct ModelGraph<double>;
template class Decomposition<float>;
template class Decomposition<double>;
template Boundary<float> run_intermediate(const Decomposition<float>&, const std::vector<int32_t>&, int64_t, int);
template Boundary<double> run_intermediate(const Decomposition<double>&, const std::vector<int32_t>&, int64_t, int);
template std::vector<int32_t> run_suffix(const Decomposition<float>&, const Boundary<float>&, int);
template std::vector<int32_t> run_suffix(const Decomposition<double>&, const Boundary<double>&, int);

}  // namespace axval::model
