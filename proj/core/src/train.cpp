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

#include "axval/model/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "axval/io/container.hpp"

namespace axval::model {

TokenData twosat_tokens(const std::vector<sat::Sample>& samples) {
  TokenData d;
  d.context = sat::kContext;
  d.count = static_cast<int64_t>(samples.size());
  d.tokens.reserve(samples.size() * sat::kContext);
  for (const auto& s : samples) {
    const auto t = sat::tokenize(s.formula);
    d.tokens.insert(d.tokens.end(), t.begin(), t.end());
    d.targets.push_back(s.sat ? sat::kSat : sat::kUnsat);
  }
  return d;
}

TokenData modadd_tokens(int p) {
  TokenData d;
  d.context = 3;
  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      d.tokens.insert(d.tokens.end(), {a, b, p});
      d.targets.push_back((a + b) % p);
    }
  }
  d.count = static_cast<int64_t>(p) * p;
  return d;
}

TokenData subset(const TokenData& data, const std::vector<int64_t>& rows) {
  TokenData d;
  d.context = data.context;
  d.count = static_cast<int64_t>(rows.size());
  d.tokens.reserve(rows.size() * static_cast<size_t>(data.context));
  for (const int64_t r : rows) {
    if (r < 0 || r >= data.count) throw std::out_of_range("row " + std::to_string(r) + " outside data");
    const auto* begin = data.tokens.data() + r * data.context;
    d.tokens.insert(d.tokens.end(), begin, begin + data.context);
    d.targets.push_back(data.targets[static_cast<size_t>(r)]);
  }
  return d;
}

std::pair<TokenData, TokenData> modadd_split(int p, double train_fraction, uint64_t seed) {
  const TokenData all = modadd_tokens(p);
  std::vector<int64_t> idx(static_cast<size_t>(all.count));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto k = static_cast<size_t>(std::llround(train_fraction * static_cast<double>(all.count)));
  return {subset(all, {idx.begin(), idx.begin() + static_cast<long>(k)}),
          subset(all, {idx.begin() + static_cast<long>(k), idx.end()})};
}

TrainState start_training(const Checkpoint& init, const TrainConfig& cfg) {
  TrainState s;
  s.checkpoint = init;
  s.optimizer = nn::adamw_init(init.params, cfg.optim);
  return s;
}

namespace {

// Mean loss over rows [begin, end) of `order`; gradients scaled by `weight` are
// added into `grads`.
double accumulate_batch(const Checkpoint& ck, const TokenData& data, const std::vector<int64_t>& order, size_t begin,
                        size_t end, float weight, nn::ParamStore& grads) {
  const auto batch = static_cast<int64_t>(end - begin);
  std::vector<int32_t> tokens;
  std::vector<int32_t> targets;
  tokens.reserve(static_cast<size_t>(batch * data.context));
  for (size_t i = begin; i < end; ++i) {
    const int64_t r = order[i];
    const auto* src = data.tokens.data() + r * data.context;
    tokens.insert(tokens.end(), src, src + data.context);
    targets.push_back(data.targets[static_cast<size_t>(r)]);
  }
  nn::Graph<float> g(true);
  std::map<std::string, nn::Var> p;
  for (const auto& [name, t] : ck.params) p.emplace(name, g.leaf(t, true));
  ModelGraph<float> m{g, ck.config, p, nullptr};
  const nn::Var states = m.prefix(tokens, batch);
  const auto [resid, hidden] = m.readout_hidden(states);
  const nn::Var loss = g.cross_entropy(m.logits(resid, hidden), targets);
  g.backward(loss);
  for (const auto& [name, v] : p) {
    const auto gr = g.grad(v);
    auto& acc = grads.at(name);
    for (int64_t i = 0; i < acc.numel(); ++i) acc[i] += weight * gr[i];
  }
  return static_cast<double>(g.value(loss).item());
}

nn::ParamStore zero_like(const nn::ParamStore& params) {
  nn::ParamStore z;
  for (const auto& [name, t] : params) z.emplace(name, nn::Tensor(t.shape()));
  return z;
}

}  // namespace

void train(TrainState& state, const TokenData& train_set, const TokenData& test_set, const TrainConfig& cfg,
           const std::function<void(const EpochLog&, const TrainState&)>& on_epoch) {
  if (train_set.count == 0) throw std::invalid_argument("empty training set");
  if (train_set.context != state.checkpoint.config.context) throw std::invalid_argument("training data context does not match model");
  if (cfg.batch_size <= 0) throw std::invalid_argument("batch size must be positive");
  state.optimizer.config = cfg.optim;
  const auto n = static_cast<size_t>(train_set.count);
  const auto bs = static_cast<size_t>(cfg.batch_size);
  for (int epoch = state.epochs_done; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed * 1000003ULL + static_cast<uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    try {
      if (cfg.full_batch) {
        auto grads = zero_like(state.checkpoint.params);
        for (size_t b = 0; b < n; b += bs) {
          const size_t e = std::min(n, b + bs);
          const auto w = static_cast<float>(static_cast<double>(e - b) / static_cast<double>(n));
          loss_sum += w * accumulate_batch(state.checkpoint, train_set, order, b, e, w, grads);
        }
        nn::adamw_step(state.checkpoint.params, grads, state.optimizer);
      } else {
        for (size_t b = 0; b < n; b += bs) {
          const size_t e = std::min(n, b + bs);
          auto grads = zero_like(state.checkpoint.params);
          const double l = accumulate_batch(state.checkpoint, train_set, order, b, e, 1.0f, grads);
          loss_sum += l * static_cast<double>(e - b) / static_cast<double>(n);
          nn::adamw_step(state.checkpoint.params, grads, state.optimizer);
        }
      }
    } catch (const nn::NumericalError& err) {
      throw nn::NumericalError("training diverged in epoch " + std::to_string(epoch) + ": " + err.what());
    }
    if (!std::isfinite(loss_sum)) throw nn::NumericalError("training diverged in epoch " + std::to_string(epoch) + ": loss is not finite");
    EpochLog log;
    log.epoch = epoch + 1;
    log.loss = loss_sum;
    const bool eval = cfg.eval_every > 0 && ((epoch + 1) % cfg.eval_every == 0 || epoch + 1 == cfg.epochs);
    if (eval) {
      log.train_accuracy = accuracy(state.checkpoint, train_set, cfg.eval_limit);
      if (test_set.count > 0) log.test_accuracy = accuracy(state.checkpoint, test_set, cfg.eval_limit);
    }
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    state.epochs_done = epoch + 1;
    state.history.push_back(log);
    auto& hist = state.checkpoint.metadata["history"];
    hist.push_back({{"epoch", log.epoch}, {"loss", log.loss}, {"train_accuracy", log.train_accuracy},
                    {"test_accuracy", log.test_accuracy}});
    state.checkpoint.metadata["epochs"] = state.epochs_done;
    if (eval) {
      state.checkpoint.metadata["train_accuracy"] = log.train_accuracy;
      state.checkpoint.metadata["test_accuracy"] = log.test_accuracy;
    }
    if (on_epoch) on_epoch(log, state);
  }
}

double accuracy(const Checkpoint& ck, const TokenData& data, int64_t limit, int64_t chunk) {
  const int64_t n = limit > 0 ? std::min(limit, data.count) : data.count;
  if (n == 0) return 0.0;
  const Decomposition<float> d(ck);
  int64_t correct = 0;
  for (int64_t b = 0; b < n; b += chunk) {
    const int64_t e = std::min(n, b + chunk);
    std::vector<int32_t> tokens(data.tokens.begin() + b * data.context, data.tokens.begin() + e * data.context);
    const auto top = d.top_token(d.forward_logits(tokens, e - b));
    for (int64_t i = b; i < e; ++i) correct += top[static_cast<size_t>(i - b)] == data.targets[static_cast<size_t>(i)];
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

void save_train_state(const TrainState& state, const std::filesystem::path& path) {
  io::Container c;
  c.manifest["kind"] = "checkpoint";
  c.manifest["config"] = state.checkpoint.config;
  c.manifest["metadata"] = state.checkpoint.metadata;
  c.manifest["optimizer"] = {{"step", state.optimizer.step}, {"epochs_done", state.epochs_done}};
  c.f32 = state.checkpoint.params;
  for (const auto& [name, t] : state.optimizer.m) c.f32.emplace("optim.m." + name, t);
  for (const auto& [name, t] : state.optimizer.v) c.f32.emplace("optim.v." + name, t);
  io::save(c, path);
}

TrainState load_train_state(const std::filesystem::path& path) {
  io::Container c = io::load(path);
  TrainState s;
  s.checkpoint = load_checkpoint(path);
  if (!c.manifest.contains("optimizer")) throw io::FormatError(path.string() + " holds no optimizer state");
  s.optimizer.step = c.manifest["optimizer"].at("step").get<int64_t>();
  s.epochs_done = c.manifest["optimizer"].at("epochs_done").get<int>();
  for (const auto& [name, t] : s.checkpoint.params) {
    s.optimizer.m.emplace(name, c.f32.at("optim.m." + name));
    s.optimizer.v.emplace(name, c.f32.at("optim.v." + name));
  }
  return s;
}

}  // namespace axval::model
