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
#include <functional>
#include <optional>
#include <vector>

#include "axval/model/transformer.hpp"
#include "axval/sat/dataset.hpp"

namespace axval::model {

// Flattened [count, context] token ids and per-sample readout targets.
struct TokenData {
  std::vector<int32_t> tokens;
  std::vector<int32_t> targets;
  int64_t count = 0;
  int64_t context = 0;
};

TokenData twosat_tokens(const std::vector<sat::Sample>& samples);
// All p*p pairs (a, b) -> (a + b) mod p, in row-major order.
TokenData modadd_tokens(int p);
// Seeded split of the mod-add pairs into train/test by fraction.
std::pair<TokenData, TokenData> modadd_split(int p, double train_fraction, uint64_t seed);
TokenData subset(const TokenData& data, const std::vector<int64_t>& rows);

struct TrainConfig {
  int epochs = 1;
  int64_t batch_size = 256;
  // One optimizer step per epoch over the whole set, accumulated in chunks of batch_size.
  bool full_batch = false;
  nn::AdamWConfig optim;
  uint64_t seed = 0;
  int eval_every = 1;
  int64_t eval_limit = 0;  // 0 evaluates the full sets
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = -1.0;
  double test_accuracy = -1.0;
  double seconds = 0.0;
};

struct TrainState {
  Checkpoint checkpoint;
  nn::AdamWState optimizer;
  int epochs_done = 0;
  std::vector<EpochLog> history;
};

TrainState start_training(const Checkpoint& init, const TrainConfig& cfg);

// Runs cfg.epochs - state.epochs_done more epochs. Throws NumericalError with
// the epoch index when the loss diverges.
void train(TrainState& state, const TokenData& train_set, const TokenData& test_set, const TrainConfig& cfg,
           const std::function<void(const EpochLog&, const TrainState&)>& on_epoch = {});

double accuracy(const Checkpoint& ck, const TokenData& data, int64_t limit = 0, int64_t chunk = 1024);

void save_train_state(const TrainState& state, const std::filesystem::path& path);
TrainState load_train_state(const std::filesystem::path& path);

}  // namespace axval::model
