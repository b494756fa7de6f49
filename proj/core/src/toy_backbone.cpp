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
#include <random>

#include "vsent/backbone.hpp"
#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

std::string_view to_string(PretrainDomain domain) {
  return domain == PretrainDomain::object ? "object" : "scene";
}

PretrainDomain parse_pretrain_domain(std::string_view text) {
  const auto t = text::to_lower(text);
  if (t == "object" || t == "imagenet") return PretrainDomain::object;
  if (t == "scene" || t == "places") return PretrainDomain::scene;
  throw InvalidArgument("unknown pretraining domain '" + std::string(text) + "'");
}

std::optional<std::size_t> canonical_feature_dim(std::string_view name) {
  if (name == "alexnet" || name == "vggnet") return 4096;
  if (name == "resnet" || name == "inception-v3") return 2048;
  if (name == "toy") return 16;
  return std::nullopt;
}

BackboneSpec parse_stream_spec(std::string_view text) {
  const auto parts = text::split(text, ':');
  if (parts.size() < 2 || parts.size() > 3)
    throw InvalidArgument("stream spec must be <domain>:<backbone>[:<dim>]: " + std::string(text));
  BackboneSpec spec;
  spec.domain = parse_pretrain_domain(text::trim(parts[0]));
  spec.name = text::to_lower(text::trim(parts[1]));
  const auto dim = canonical_feature_dim(spec.name);
  if (!dim) throw InvalidArgument("unknown backbone '" + spec.name + "'");
  spec.feature_dim = *dim;
  if (parts.size() == 3) {
    try {
      std::size_t used = 0;
      const auto v = std::stoul(parts[2], &used);
      if (used != parts[2].size() || v == 0) throw std::invalid_argument(parts[2]);
      spec.feature_dim = v;
    } catch (const std::exception&) {
      throw InvalidArgument("bad feature dimension in stream spec: " + std::string(text));
    }
  }
  return spec;
}

std::string format_stream_spec(const BackboneSpec& spec) {
  return std::string(to_string(spec.domain)) + ":" + spec.name + ":" + std::to_string(spec.feature_dim);
}

namespace {

std::string display_name(const std::string& name) {
  if (name == "alexnet") return "AlexNet";
  if (name == "vggnet") return "VggNet";
  if (name == "resnet") return "ResNet";
  if (name == "inception-v3") return "Inception-v3";
  if (name == "toy") return "Toy";
  return name;
}

}  // namespace

std::string describe_streams(const std::vector<BackboneSpec>& streams) {
  auto one = [](const BackboneSpec& s, bool fused) {
    const char* data = s.domain == PretrainDomain::object ? "ImageNet" : "Places";
    return fused ? display_name(s.name) + " " + (s.domain == PretrainDomain::object ? "ImageNet" : "places")
                 : display_name(s.name) + " (" + data + ")";
  };
  if (streams.size() == 1) return one(streams.front(), false);
  std::string out = "Fusion (";
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (i) out += " + ";
    out += one(streams[i], true);
  }
  return out + ")";
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::size_t index) {
  // splitmix64 step
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ToyConvBackbone::ToyConvBackbone(BackboneSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  if (spec_.name != "toy") throw InvalidArgument("ToyConvBackbone requires backbone name 'toy'");
  if (spec_.feature_dim == 0) throw InvalidArgument("feature_dim must be positive");
  if (spec_.input_size < 8) throw InvalidArgument("input_size must be at least 8");

  const auto k = static_cast<Eigen::Index>(spec_.feature_dim);
  filters_.resize(k, kFanIn);
  biases_.resize(k);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> weight(0.0, std::sqrt(2.0 / kFanIn));
  std::uniform_real_distribution<double> bias(-0.1, 0.1);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < kFanIn; ++c) filters_(r, c) = weight(rng);
    biases_(r) = bias(rng);
  }

  for (int y = 1; y + 1 < spec_.input_size; ++y)
    for (int x = 1; x + 1 < spec_.input_size; ++x) pooled_ += pools(y, x) ? 1 : 0;
}

void ToyConvBackbone::set_parameters(Eigen::MatrixXd filters, Eigen::VectorXd biases) {
  if (filters.rows() != filters_.rows() || filters.cols() != filters_.cols() ||
      biases.size() != biases_.size())
    throw InvalidArgument("toy backbone: parameter shape mismatch");
  filters_ = std::move(filters);
  biases_ = std::move(biases);
}

bool ToyConvBackbone::pools(int y, int x) const {
  const int s = spec_.input_size;
  if (y < 1 || x < 1 || y + 1 >= s || x + 1 >= s) return false;
  const int lo = s / 4, hi = s - s / 4;  // central half: [lo, hi)
  const bool inside = y - 1 >= lo && y + 1 < hi && x - 1 >= lo && x + 1 < hi;
  const bool outside = y + 1 < lo || y - 1 >= hi || x + 1 < lo || x - 1 >= hi;
  return spec_.domain == PretrainDomain::object ? inside : outside;
}

void ToyConvBackbone::patch(const Image& input, int y, int x, Eigen::Matrix<double, kFanIn, 1>& out) const {
  int i = 0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      for (int c = 0; c < Image::kChannels; ++c) out(i++) = input.at(y + dy, x + dx, c);
}

Eigen::VectorXd ToyConvBackbone::extract(const Image& image) const {
  if (image.height == spec_.input_size && image.width == spec_.input_size) return forward(image);
  return forward(resize(image, spec_.input_size, spec_.input_size));
}

Eigen::VectorXd ToyConvBackbone::forward(const Image& input) const {
  if (input.height != spec_.input_size || input.width != spec_.input_size)
    throw InvalidArgument("toy backbone: input is not input_size x input_size");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(filters_.rows());
  Eigen::Matrix<double, kFanIn, 1> p;
  for (int y = 1; y + 1 < spec_.input_size; ++y) {
    for (int x = 1; x + 1 < spec_.input_size; ++x) {
      if (!pools(y, x)) continue;
      patch(input, y, x, p);
      acc += (filters_ * p + biases_).cwiseMax(0.0);
    }
  }
  return acc / static_cast<double>(pooled_);
}

ToyConvBackbone::Gradient ToyConvBackbone::zero_gradient() const {
  return {Eigen::MatrixXd::Zero(filters_.rows(), filters_.cols()), Eigen::VectorXd::Zero(biases_.size())};
}

void ToyConvBackbone::backward(const Image& input, const Eigen::VectorXd& grad_features,
                               Gradient& grad) const {
  if (grad_features.size() != filters_.rows())
    throw InvalidArgument("toy backbone: gradient length mismatch");
  const Eigen::VectorXd g = grad_features / static_cast<double>(pooled_);
  Eigen::Matrix<double, kFanIn, 1> p;
  for (int y = 1; y + 1 < spec_.input_size; ++y) {
    for (int x = 1; x + 1 < spec_.input_size; ++x) {
      if (!pools(y, x)) continue;
      patch(input, y, x, p);
      const Eigen::VectorXd z = filters_ * p + biases_;
      const Eigen::VectorXd gz = (z.array() > 0.0).cast<double>() * g.array();
      grad.filters.noalias() += gz * p.transpose();
      grad.biases += gz;
    }
  }
}

ToyConvBackbone make_backbone(const BackboneSpec& spec, std::uint64_t seed) {
  if (spec.name != "toy")
    throw ConfigError("weights for backbone '" + spec.name +
                      "' are not bundled; only the 'toy' extractor can be instantiated");
  return ToyConvBackbone(spec, seed);
}

}  // namespace vsent
