/* Copyright 2026 The vsent Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vsent {

/// Interleaved RGB image with float samples in [0, 1], row-major (HWC).
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> pixels;

  static constexpr int kChannels = 3;

  Image() = default;
  Image(int h, int w) : height(h), width(w), pixels(static_cast<std::size_t>(h) * w * kChannels) {}

  bool empty() const noexcept { return pixels.empty(); }

  float& at(int y, int x, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
  }
  float at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * kChannels + c];
  }
};

/// Decodes PNG, JPEG, PPM and the other formats OpenCV understands.
/// Throws DataError carrying `image_id` when the file cannot be decoded.
Image load_image(const std::filesystem::path& path, std::string_view image_id);
Image decode_image(std::string_view bytes, std::string_view image_id);

/// Area-averaging resize (bilinear when upscaling).
Image resize(const Image& image, int height, int width);

/// Encodes as PNG and writes it.
void save_png(const std::filesystem::path& path, const Image& image);

}  // namespace vsent
