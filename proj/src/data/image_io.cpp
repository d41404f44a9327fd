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

#include "maskct/data/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "maskct/core/error.hpp"
#include "maskct/io/tensor_container.hpp"

namespace maskct::data {

ImagePlane decode_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("image not found: " + path.string());
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw DataError("cannot decode image: " + path.string());
  ImagePlane img(bgr.rows, bgr.cols, 255.0);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      img.at(y, x, 0) = row[x][2];
      img.at(y, x, 1) = row[x][1];
      img.at(y, x, 2) = row[x][0];
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const ImagePlane& img) {
  if (img.empty()) throw std::invalid_argument("cannot write an empty image");
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  const double scale = 255.0 / img.max_intensity();
  for (int y = 0; y < img.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c)
        row[x][2 - c] = static_cast<std::uint8_t>(quantize_intensity(img.at(y, x, c) * scale, 255.0));
  }
  std::vector<std::uint8_t> buffer;
  if (!cv::imencode(".png", bgr, buffer)) throw DataError("PNG encoding failed for " + path.string());
  io::write_file_atomic(path, std::string(buffer.begin(), buffer.end()));
}

ImagePlane resize_bilinear(const ImagePlane& img, int height, int width) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("resize target must be positive");
  if (img.empty()) throw std::invalid_argument("cannot resize an empty image");
  if (img.height() == height && img.width() == width) return img;
  cv::Mat src(img.height(), img.width(), CV_64FC3, const_cast<double*>(img.data().data()));
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(width, height), 0.0, 0.0, cv::INTER_LINEAR);
  ImagePlane out(height, width, img.max_intensity());
  std::copy(dst.ptr<double>(), dst.ptr<double>() + out.size(), out.data().begin());
  return out;
}

}  // namespace maskct::data
