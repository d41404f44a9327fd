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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "maskct/io/tensor_container.hpp"
#include "maskct/labels/label_state.hpp"
#include "maskct/model/model.hpp"

namespace maskct::model {

inline constexpr const char* kCheckpointFormat = "maskct-checkpoint-v1";

struct Checkpoint {
  MaskCtModel model;
  labels::LabelVocabulary vocabulary;
  std::map<std::string, std::string> metadata;
  io::TensorContainer container;  // raw access to auxiliary tensors (optimizer state)
};

// Writes every model parameter plus metadata (model config, vocabulary and
// any caller-supplied entries such as the run-config hash).
void save_checkpoint(const std::filesystem::path& path, const MaskCtModel& model,
                     const labels::LabelVocabulary& vocabulary, std::map<std::string, std::string> metadata = {},
                     const std::vector<io::TensorRef>& extra = {});

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace maskct::model
