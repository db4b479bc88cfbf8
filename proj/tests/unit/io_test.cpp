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

#include <gtest/gtest.h>

#include <filesystem>

#include "axval/io/container.hpp"

namespace axval {
namespace {

TEST(Container, RoundTripsTensorsAndManifest) {
  io::Container c;
  c.manifest["kind"] = "test";
  c.f32.emplace("w", nn::Tensor({2, 2}, {1.f, -2.f, 3.5f, 0.f}));
  c.f64.emplace("d", nn::Tensor64({3}, {0.1, 0.2, 0.3}));
  const io::Container r = io::deserialize(io::serialize(c));
  EXPECT_EQ(r.manifest, c.manifest);
  EXPECT_EQ(r.f32.at("w"), c.f32.at("w"));
  EXPECT_EQ(r.f64.at("d"), c.f64.at("d"));
  EXPECT_EQ(io::serialize(r), io::serialize(c));
}

TEST(Container, RejectsCorruptInput) {
  io::Container c;
  c.f32.emplace("w", nn::Tensor({4}));
  std::string bytes = io::serialize(c);
  EXPECT_THROW(io::deserialize("NOTACKPT" + bytes.substr(8)), io::FormatError);
  EXPECT_THROW(io::deserialize(bytes.substr(0, bytes.size() - 3)), io::FormatError);
  EXPECT_THROW(io::load("/nonexistent/file.axv"), std::exception);
}

TEST(Hashing, GitBlobHashMatchesGit) {
  EXPECT_EQ(io::git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(io::git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(io::sha1_hex("abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
}

}  // namespace
}  // namespace axval
