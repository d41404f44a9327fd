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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "maskct/core/tensor.hpp"

// Named-tensor container in the safetensors layout:
//   u64 little-endian header length | JSON index | raw tensor bytes.
// The JSON index maps each tensor name to {dtype, shape, data_offsets} and
// carries string metadata under "__metadata__".
namespace maskct::io {

struct TensorEntry {
  std::string name;
  std::string dtype;  // "F64" or "F32"
  std::vector<std::int64_t> shape;
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  std::int64_t element_count() const;
};

class TensorContainer {
 public:
  static TensorContainer read(const std::filesystem::path& path);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const TensorEntry& entry(const std::string& name) const;
  std::vector<std::string> names() const;
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  // Flat values in storage order, widened to double.
  std::vector<double> values(const std::string& name) const;
  // 1-D tensors become a single row; 2-D tensors keep their shape.
  Matrix matrix(const std::string& name) const;

 private:
  std::map<std::string, TensorEntry> entries_;
  std::map<std::string, std::string> metadata_;
  std::vector<char> data_;
};

struct TensorRef {
  std::string name;
  const Matrix* value = nullptr;
};

// Writes F64 tensors with 2-D shapes. The file appears atomically (temp + rename).
void write_tensor_container(const std::filesystem::path& path, const std::vector<TensorRef>& tensors,
                            const std::map<std::string, std::string>& metadata);

// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace maskct::io
