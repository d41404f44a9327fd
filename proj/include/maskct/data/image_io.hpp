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

#include "maskct/augment/image_plane.hpp"

namespace maskct::data {

// Decodes an 8-bit image file into an RGB plane with I_max = 255.
ImagePlane decode_image(const std::filesystem::path& path);
// Writes an RGB plane as an 8-bit PNG (values are rounded and clamped first).
void write_png(const std::filesystem::path& path, const ImagePlane& img);
// Bilinear resize; a plane already at the target size is returned unchanged.
ImagePlane resize_bilinear(const ImagePlane& img, int height, int width);

}  // namespace maskct::data
