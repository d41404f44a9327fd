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

#include "maskct/data/video.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/videoio.hpp>
#include <spdlog/spdlog.h>

#include "maskct/core/error.hpp"

namespace maskct::data {

void VideoClipSpec::validate() const {
  if (!(fps > 0.0)) throw std::invalid_argument("clip fps must be positive");
  if (segments.empty()) throw std::invalid_argument("clip " + name + " has no annotated segments");
  const std::size_t labels = segments.front().bits.size();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (s.first < 0 || s.last < s.first) throw std::invalid_argument("clip " + name + " has an empty segment");
    if (s.bits.size() != labels || labels == 0)
      throw std::invalid_argument("clip " + name + " segments disagree on the label count");
    if (i > 0 && s.first <= segments[i - 1].last)
      throw std::invalid_argument("clip " + name + " segments overlap or are unsorted");
  }
}

const Segment* VideoClipSpec::segment_for(std::int64_t frame) const {
  auto it = std::upper_bound(segments.begin(), segments.end(), frame,
                             [](std::int64_t f, const Segment& s) { return f < s.first; });
  if (it == segments.begin()) return nullptr;
  --it;
  return frame <= it->last ? &*it : nullptr;
}

VideoClipSpec VideoClipSpec::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  VideoClipSpec spec;
  spec.name = j.value("name", "");
  std::filesystem::path source = j.at("source").get<std::string>();
  spec.source = source.is_absolute() || base_dir.empty() ? source : base_dir / source;
  spec.fps = j.value("fps", 30.0);
  if (j.contains("width")) spec.width = j.at("width").get<int>();
  if (j.contains("height")) spec.height = j.at("height").get<int>();
  for (const auto& s : j.at("segments"))
    spec.segments.push_back(
        {s.at("first").get<std::int64_t>(), s.at("last").get<std::int64_t>(), s.at("bits").get<std::vector<std::uint8_t>>()});
  spec.validate();
  return spec;
}

nlohmann::ordered_json VideoClipSpec::to_json() const {
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const auto& s : segments) segs.push_back({{"first", s.first}, {"last", s.last}, {"bits", s.bits}});
  nlohmann::ordered_json j = {{"name", name}, {"source", source.string()}, {"fps", fps}};
  if (width) j["width"] = *width;
  if (height) j["height"] = *height;
  j["segments"] = segs;
  return j;
}

namespace {

std::int64_t frame_number(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  auto end = stem.find_last_of("0123456789");
  if (end == std::string::npos) return -1;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  return std::stoll(stem.substr(begin, end - begin + 1));
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> frames;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") frames.push_back(e.path());
  }
  std::sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) {
    const auto na = frame_number(a);
    const auto nb = frame_number(b);
    return na != nb ? na < nb : a.filename() < b.filename();
  });
  return frames;
}

std::vector<std::filesystem::path> decode_video(const VideoClipSpec& spec, const std::filesystem::path& frame_dir,
                                                int& width, int& height) {
  if (frame_dir.empty()) throw DataError("video extraction needs an output frame directory");
  cv::VideoCapture cap(spec.source.string());
  if (!cap.isOpened()) throw DataError("cannot open video: " + spec.source.string());
  double source_fps = cap.get(cv::CAP_PROP_FPS);
  if (!(source_fps > 0.0)) source_fps = spec.fps;
  std::filesystem::create_directories(frame_dir);
  std::vector<std::filesystem::path> frames;
  cv::Mat frame;
  std::int64_t next = 0;
  for (std::int64_t i = 0; cap.read(frame); ++i) {
    const auto slot = static_cast<std::int64_t>(std::floor(static_cast<double>(i) * spec.fps / source_fps + 1e-9));
    if (slot < next) continue;
    next = slot + 1;
    width = frame.cols;
    height = frame.rows;
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.png", frames.size());
    const auto path = frame_dir / name;
    if (!cv::imwrite(path.string(), frame)) throw DataError("cannot write frame " + path.string());
    frames.push_back(path);
  }
  return frames;
}

}  // namespace

FrameExtraction extract_frames(const VideoClipSpec& spec, const std::filesystem::path& frame_dir) {
  spec.validate();
  if (!std::filesystem::exists(spec.source)) throw DataError("clip source not found: " + spec.source.string());
  FrameExtraction out;
  std::vector<std::filesystem::path> frames;
  if (std::filesystem::is_directory(spec.source)) {
    frames = list_frames(spec.source);
    if (!frames.empty()) {
      cv::Mat first = cv::imread(frames.front().string(), cv::IMREAD_COLOR);
      if (first.empty()) throw DataError("cannot decode frame " + frames.front().string());
      out.width = first.cols;
      out.height = first.rows;
    }
  } else {
    frames = decode_video(spec, frame_dir, out.width, out.height);
  }
  if (frames.empty()) throw DataError("clip " + spec.name + " contains no frames");
  out.frames_total = static_cast<std::int64_t>(frames.size());
  if ((spec.width && *spec.width != out.width) || (spec.height && *spec.height != out.height))
    throw DataError("clip " + spec.name + " frames are " + std::to_string(out.width) + "x" +
                    std::to_string(out.height) + ", spec declares " + std::to_string(spec.width.value_or(0)) + "x" +
                    std::to_string(spec.height.value_or(0)));
  if (spec.segments.back().last >= out.frames_total)
    throw DataError("clip " + spec.name + " annotation reaches frame " + std::to_string(spec.segments.back().last) +
                    " but the clip has " + std::to_string(out.frames_total) + " frames");

  out.manifest.labels = spec.segments.front().bits.size();
  for (std::int64_t f = 0; f < out.frames_total; ++f) {
    const Segment* seg = spec.segment_for(f);
    if (!seg) {
      out.unlabeled.push_back(f);
      continue;
    }
    ManifestRecord r;
    r.path = std::filesystem::absolute(frames[static_cast<std::size_t>(f)]).string();
    r.bits = seg->bits;
    r.source = spec.name;
    r.frame = f;
    out.manifest.records.push_back(std::move(r));
  }
  if (!out.unlabeled.empty())
    spdlog::warn("clip {}: {} frame(s) outside every annotated segment were excluded", spec.name, out.unlabeled.size());
  return out;
}

}  // namespace maskct::data
