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

#include "maskct/model/checkpoint.hpp"

#include <json.hpp>

#include "maskct/core/error.hpp"

namespace maskct::model {

void save_checkpoint(const std::filesystem::path& path, const MaskCtModel& model,
                     const labels::LabelVocabulary& vocabulary, std::map<std::string, std::string> metadata,
                     const std::vector<io::TensorRef>& extra) {
  if (vocabulary.size() != static_cast<std::size_t>(model.config().num_labels))
    throw std::invalid_argument("vocabulary size does not match the model label count");
  metadata["format"] = kCheckpointFormat;
  metadata["model_config"] = model.config().to_json().dump();
  metadata["vocabulary"] = nlohmann::json(vocabulary.names()).dump();
  std::vector<io::TensorRef> tensors;
  for (const auto& p : model.parameters()) tensors.push_back({p.name, &p.value});
  tensors.insert(tensors.end(), extra.begin(), extra.end());
  io::write_tensor_container(path, tensors, metadata);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("checkpoint not found: " + path.string());
  auto container = io::TensorContainer::read(path);
  const auto& meta = container.metadata();
  auto it = meta.find("format");
  if (it == meta.end() || it->second != kCheckpointFormat)
    throw DataError(path.string() + " is not a model checkpoint");
  ModelConfig config = ModelConfig::from_json(nlohmann::json::parse(meta.at("model_config")));
  auto names = nlohmann::json::parse(meta.at("vocabulary")).get<std::vector<std::string>>();

  MaskCtModel model(config, 0);
  for (std::size_t id = 0; id < model.parameters().size(); ++id) {
    Parameter& p = model.parameters().at(id);
    if (!container.contains(p.name)) throw DataError("checkpoint is missing tensor " + p.name);
    Matrix m = container.matrix(p.name);
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols())
      throw DataError("shape mismatch for tensor " + p.name);
    p.value = std::move(m);
  }
  return Checkpoint{std::move(model), labels::LabelVocabulary(std::move(names)), meta, std::move(container)};
}

}  // namespace maskct::model
