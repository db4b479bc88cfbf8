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
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "axval/nn/tensor.hpp"

namespace axval::io {

// Binary layout (all integers little-endian):
//   "AXVCKPT1" | u32 version | u64 manifest_len | manifest JSON bytes
//   u32 tensor_count
//   per tensor: u32 name_len | name | u8 dtype (0 f32, 1 f64) | u32 ndim
//               | u64 dims[ndim] | u64 byte_len | raw bytes
struct Container {
  static constexpr uint32_t kVersion = 1;

  nlohmann::json manifest = nlohmann::json::object();
  std::map<std::string, nn::Tensor> f32;
  std::map<std::string, nn::Tensor64> f64;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize(const Container& c);
Container deserialize(const std::string& bytes);

void save(const Container& c, const std::filesystem::path& path);
Container load(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

// git blob hash: sha1("blob <len>\0" + bytes), lowercase hex.
std::string git_blob_hash(const std::string& bytes);
std::string sha1_hex(const std::string& bytes);

}  // namespace axval::io
