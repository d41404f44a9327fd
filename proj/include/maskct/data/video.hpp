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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskct/data/manifest.hpp"

namespace maskct::data {

// Inclusive frame range sharing one label annotation.
struct Segment {
  std::int64_t first = 0;
  std::int64_t last = 0;
  std::vector<std::uint8_t> bits;
};

struct VideoClipSpec {
  std::string name;
  std::filesystem::path source;  // video file or directory of numbered PNG frames
  double fps = 30.0;
  std::vector<Segment> segments;
  std::optional<int> width;  // declared frame size, checked when present
  std::optional<int> height;

  // Segments sorted, non-overlapping, non-empty and sharing one label count.
  void validate() const;
  // Segment covering `frame`, if any.
  const Segment* segment_for(std::int64_t frame) const;

  static VideoClipSpec from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  nlohmann::ordered_json to_json() const;
};

struct FrameExtraction {
  DatasetManifest manifest;
  std::int64_t frames_total = 0;
  std::vector<std::int64_t> unlabeled;  // frames outside every segment, excluded from the manifest
  int width = 0;
  int height = 0;
};

// One record per annotated frame, labels from the covering segment. Video
// sources are decoded with OpenCV, resampled to spec.fps and written as PNG
// files into `frame_dir`; a PNG directory is used in place, ordered by the
// number embedded in each file name.
FrameExtraction extract_frames(const VideoClipSpec& spec, const std::filesystem::path& frame_dir = {});

}  // namespace maskct::data
