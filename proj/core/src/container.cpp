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

#include "axval/io/container.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace axval::io {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'A', 'X', 'V', 'C', 'K', 'P', 'T', '1'};

template <typename U>
void put(std::string& out, U v) {
  char buf[sizeof(U)];
  std::memcpy(buf, &v, sizeof(U));
  out.append(buf, sizeof(U));
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U v;
    std::memcpy(&v, s_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }

  std::string bytes(uint64_t n) {
    need(n);
    std::string out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == s_.size(); }

 private:
  void need(uint64_t n) const {
    if (n > s_.size() - pos_) throw FormatError("container truncated at byte " + std::to_string(pos_));
  }
  const std::string& s_;
  size_t pos_ = 0;
};

template <typename T>
void put_tensor(std::string& out, const std::string& name, const nn::BasicTensor<T>& t, uint8_t dtype) {
  put<uint32_t>(out, static_cast<uint32_t>(name.size()));
  out += name;
  put<uint8_t>(out, dtype);
  put<uint32_t>(out, static_cast<uint32_t>(t.rank()));
  for (const int64_t d : t.shape()) put<uint64_t>(out, static_cast<uint64_t>(d));
  const uint64_t n = static_cast<uint64_t>(t.numel()) * sizeof(T);
  put<uint64_t>(out, n);
  out.append(reinterpret_cast<const char*>(t.ptr()), n);
}

template <typename T>
nn::BasicTensor<T> read_tensor(Reader& r, const nn::Shape& shape, const std::string& name) {
  const auto n = r.get<uint64_t>();
  if (n != static_cast<uint64_t>(nn::shape_numel(shape)) * sizeof(T)) {
    throw FormatError("tensor " + name + ": byte length does not match shape " + nn::shape_str(shape));
  }
  std::vector<T> data(static_cast<size_t>(nn::shape_numel(shape)));
  const std::string raw = r.bytes(n);
  std::memcpy(data.data(), raw.data(), n);
  return nn::BasicTensor<T>(shape, std::move(data));
}

}  // namespace

std::string serialize(const Container& c) {
  std::string out(kMagic, sizeof(kMagic));
  put<uint32_t>(out, Container::kVersion);
  const std::string manifest = c.manifest.dump(2);
  put<uint64_t>(out, manifest.size());
  out += manifest;
  put<uint32_t>(out, static_cast<uint32_t>(c.f32.size() + c.f64.size()));
  for (const auto& [name, t] : c.f32) put_tensor(out, name, t, 0);
  for (const auto& [name, t] : c.f64) put_tensor(out, name, t, 1);
  return out;
}

Container deserialize(const std::string& bytes) {
  Reader r(bytes);
  if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) throw FormatError("bad container magic");
  const auto version = r.get<uint32_t>();
  if (version != Container::kVersion) throw FormatError("unsupported container version " + std::to_string(version));
  Container c;
  const auto mlen = r.get<uint64_t>();
  c.manifest = nlohmann::json::parse(r.bytes(mlen));
  const auto count = r.get<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    const auto nlen = r.get<uint32_t>();
    const std::string name = r.bytes(nlen);
    const auto dtype = r.get<uint8_t>();
    const auto ndim = r.get<uint32_t>();
    nn::Shape shape(ndim);
    for (auto& d : shape) d = static_cast<int64_t>(r.get<uint64_t>());
    if (dtype == 0) {
      if (!c.f32.emplace(name, read_tensor<float>(r, shape, name)).second) throw FormatError("duplicate tensor " + name);
    } else if (dtype == 1) {
      if (!c.f64.emplace(name, read_tensor<double>(r, shape, name)).second) throw FormatError("duplicate tensor " + name);
    } else {
      throw FormatError("tensor " + name + ": unknown dtype " + std::to_string(dtype));
    }
  }
  if (!r.done()) throw FormatError("trailing bytes after last tensor");
  return c;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void save(const Container& c, const std::filesystem::path& path) { write_file(path, serialize(c)); }

Container load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

std::string sha1_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("sha1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    const unsigned char b = md[i];
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

std::string git_blob_hash(const std::string& bytes) {
  std::string buf = "blob " + std::to_string(bytes.size());
  buf.push_back('\0');
  buf += bytes;
  return sha1_hex(buf);
}

}  // namespace axval::io
