// Copyright 2026 The maskct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskct/io/tensor_container.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "maskct/core/error.hpp"

namespace maskct::io {
namespace {

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "F64") return 8;
  if (dtype == "F32") return 4;
  throw DataError("unsupported tensor dtype " + dtype);
}

}  // namespace

std::int64_t TensorEntry::element_count() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

TensorContainer TensorContainer::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tensor container: " + path.string());
  std::uint64_t header_len = 0;
  unsigned char len_bytes[8];
  if (!in.read(reinterpret_cast<char*>(len_bytes), 8)) throw DataError("truncated tensor container: " + path.string());
  for (int i = 7; i >= 0; --i) header_len = (header_len << 8) | len_bytes[i];
  if (header_len > (1ULL << 31)) throw DataError("implausible header length in " + path.string());
  std::string header(header_len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(header_len)))
    throw DataError("truncated tensor index in " + path.string());

  TensorContainer c;
  c.data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());

  nlohmann::json index;
  try {
    index = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed tensor index in " + path.string() + ": " + e.what());
  }
  for (auto it = index.begin(); it != index.end(); ++it) {
    if (it.key() == "__metadata__") {
      for (auto m = it->begin(); m != it->end(); ++m) c.metadata_[m.key()] = m->get<std::string>();
      continue;
    }
    TensorEntry e;
    e.name = it.key();
    e.dtype = it->at("dtype").get<std::string>();
    e.shape = it->at("shape").get<std::vector<std::int64_t>>();
    auto offsets = it->at("data_offsets").get<std::vector<std::uint64_t>>();
    if (offsets.size() != 2) throw DataError("bad data_offsets for tensor " + e.name);
    e.begin = offsets[0];
    e.end = offsets[1];
    if (e.end < e.begin || e.end > c.data_.size() ||
        (e.end - e.begin) != static_cast<std::uint64_t>(e.element_count()) * dtype_size(e.dtype))
      throw DataError("tensor " + e.name + " has inconsistent byte range");
    c.entries_.emplace(e.name, std::move(e));
  }
  return c;
}

const TensorEntry& TensorContainer::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw DataError("tensor not found: " + name);
  return it->second;
}

std::vector<std::string> TensorContainer::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::vector<double> TensorContainer::values(const std::string& name) const {
  const TensorEntry& e = entry(name);
  std::vector<double> out(static_cast<std::size_t>(e.element_count()));
  const char* src = data_.data() + e.begin;
  if (e.dtype == "F64") {
    std::memcpy(out.data(), src, out.size() * sizeof(double));
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      float f;
      std::memcpy(&f, src + i * sizeof(float), sizeof(float));
      out[i] = f;
    }
  }
  return out;
}

Matrix TensorContainer::matrix(const std::string& name) const {
  const TensorEntry& e = entry(name);
  Eigen::Index rows = 1, cols = 1;
  if (e.shape.size() == 1) {
    cols = e.shape[0];
  } else if (e.shape.size() == 2) {
    rows = e.shape[0];
    cols = e.shape[1];
  } else if (!e.shape.empty()) {
    throw DataError("tensor " + name + " is not 1-D or 2-D");
  }
  auto v = values(name);
  return Eigen::Map<Matrix>(v.data(), rows, cols);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_tensor_container(const std::filesystem::path& path, const std::vector<TensorRef>& tensors,
                            const std::map<std::string, std::string>& metadata) {
  nlohmann::ordered_json index;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  index["__metadata__"] = meta;
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    const auto bytes = static_cast<std::uint64_t>(t.value->size()) * sizeof(double);
    index[t.name] = {{"dtype", "F64"},
                     {"shape", {t.value->rows(), t.value->cols()}},
                     {"data_offsets", {offset, offset + bytes}}};
    offset += bytes;
  }
  std::string header = index.dump();
  while (header.size() % 8 != 0) header.push_back(' ');

  std::string blob;
  blob.reserve(8 + header.size() + offset);
  std::uint64_t len = header.size();
  for (int i = 0; i < 8; ++i) blob.push_back(static_cast<char>((len >> (8 * i)) & 0xFF));
  blob += header;
  for (const auto& t : tensors)
    blob.append(reinterpret_cast<const char*>(t.value->data()), static_cast<std::size_t>(t.value->size()) * sizeof(double));
  write_file_atomic(path, blob);
}

}  // namespace maskct::io
