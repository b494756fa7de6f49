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
#include "vsent/image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>

#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

namespace {

Image from_bgr(const cv::Mat& bgr8) {
  cv::Mat rgb;
  cv::cvtColor(bgr8, rgb, cv::COLOR_BGR2RGB);
  cv::Mat f;
  rgb.convertTo(f, CV_32FC3, 1.0 / 255.0);
  Image out(f.rows, f.cols);
  for (int y = 0; y < f.rows; ++y) {
    const auto* row = f.ptr<float>(y);
    std::copy(row, row + static_cast<std::ptrdiff_t>(f.cols) * Image::kChannels,
              out.pixels.begin() + static_cast<std::ptrdiff_t>(y) * f.cols * Image::kChannels);
  }
  return out;
}

cv::Mat as_mat(const Image& image) {
  // cv::Mat does not own the buffer; callers clone when needed.
  return cv::Mat(image.height, image.width, CV_32FC3, const_cast<float*>(image.pixels.data()));
}

}  // namespace

Image decode_image(std::string_view bytes, std::string_view image_id) {
  if (bytes.empty()) throw DataError(std::string(image_id), "empty image data");
  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
  cv::Mat decoded;
  try {
    decoded = cv::imdecode(buf, cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw DataError(std::string(image_id), std::string("cannot decode image: ") + e.what());
  }
  if (decoded.empty()) throw DataError(std::string(image_id), "cannot decode image");
  return from_bgr(decoded);
}

Image load_image(const std::filesystem::path& path, std::string_view image_id) {
  std::string bytes;
  try {
    bytes = text::read_file(path);
  } catch (const DataError& e) {
    throw DataError(std::string(image_id), e.what());
  }
  return decode_image(bytes, image_id);
}

Image resize(const Image& image, int height, int width) {
  if (height <= 0 || width <= 0) throw InvalidArgument("resize: non-positive target size");
  if (image.empty()) throw InvalidArgument("resize: empty image");
  if (image.height == height && image.width == width) return image;
  cv::Mat dst;
  const bool shrinking = height <= image.height && width <= image.width;
  cv::resize(as_mat(image), dst, cv::Size(width, height), 0, 0,
             shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  Image out(height, width);
  for (int y = 0; y < height; ++y) {
    const auto* row = dst.ptr<float>(y);
    std::copy(row, row + static_cast<std::ptrdiff_t>(width) * Image::kChannels,
              out.pixels.begin() + static_cast<std::ptrdiff_t>(y) * width * Image::kChannels);
  }
  return out;
}

void save_png(const std::filesystem::path& path, const Image& image) {
  cv::Mat rgb8;
  as_mat(image).convertTo(rgb8, CV_8UC3, 255.0);
  cv::Mat bgr;
  cv::cvtColor(rgb8, bgr, cv::COLOR_RGB2BGR);
  std::vector<unsigned char> buf;
  if (!cv::imencode(".png", bgr, buf)) throw DataError(path.string(), "PNG encoding failed");
  text::write_file(path, std::string_view(reinterpret_cast<const char*>(buf.data()), buf.size()));
}

}  // namespace vsent
