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

// Feature extractors for the object and scene streams.
//
// Real ImageNet/Places backbones are not bundled. The known backbone names are
// recognized so configurations and fused dimensions can be described, but
// only the "toy" extractor can be instantiated: a seeded, randomly initialized
// 3x3 convolution followed by ReLU and masked average pooling.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vsent/image.hpp"

namespace vsent {

enum class PretrainDomain { object, scene };

std::string_view to_string(PretrainDomain domain);
/// Accepts "object"/"imagenet" and "scene"/"places". Throws InvalidArgument.
PretrainDomain parse_pretrain_domain(std::string_view text);

struct BackboneSpec {
  std::string name;
  PretrainDomain domain = PretrainDomain::object;
  std::size_t feature_dim = 0;
  int input_size = 32;

  friend bool operator==(const BackboneSpec&, const BackboneSpec&) = default;
};

/// Output width of a named backbone's penultimate layer: 4096 for alexnet and
/// vggnet, 2048 for resnet and inception-v3, 16 for toy.
std::optional<std::size_t> canonical_feature_dim(std::string_view name);

/// Parses "<domain>:<name>[:<feature_dim>]", e.g. "object:toy:32" or
/// "scene:vggnet". Throws InvalidArgument.
BackboneSpec parse_stream_spec(std::string_view text);
std::string format_stream_spec(const BackboneSpec& spec);

/// Human-readable model label, e.g. "Toy (ImageNet)" or
/// "Fusion (Toy Places + Toy ImageNet)".
std::string describe_streams(const std::vector<BackboneSpec>& streams);

/// Randomly initialized convolutional feature extractor.
///
/// The input is resized to input_size x input_size. Each of feature_dim
/// filters is a 3x3x3 kernel plus bias; its ReLU response is averaged over a
/// pooling mask that depends on the pretraining domain. Object-domain
/// extractors pool over windows lying inside the central half of the image
/// (the foreground). Scene-domain extractors pool over windows lying entirely
/// outside it (the background).
class ToyConvBackbone {
 public:
  static constexpr int kKernel = 3;
  static constexpr int kFanIn = kKernel * kKernel * Image::kChannels;

  /// Throws InvalidArgument when spec.name is not "toy", feature_dim is 0
  /// or input_size < 8.
  ToyConvBackbone(BackboneSpec spec, std::uint64_t seed);

  const BackboneSpec& spec() const noexcept { return spec_; }

  /// feature_dim x 27; row k holds filter k in (dy, dx, channel) order.
  const Eigen::MatrixXd& filters() const noexcept { return filters_; }
  const Eigen::VectorXd& biases() const noexcept { return biases_; }
  void set_parameters(Eigen::MatrixXd filters, Eigen::VectorXd biases);

  /// Resizes when needed, then runs the forward pass.
  Eigen::VectorXd extract(const Image& image) const;

  /// Forward pass on an image already at input_size.
  Eigen::VectorXd forward(const Image& input) const;

  struct Gradient {
    Eigen::MatrixXd filters;
    Eigen::VectorXd biases;
  };

  /// Accumulates d(loss)/d(parameters) into `grad` given d(loss)/d(features)
  /// for one input at input_size.
  void backward(const Image& input, const Eigen::VectorXd& grad_features, Gradient& grad) const;

  Gradient zero_gradient() const;

  /// True when the window centred at (y, x) is pooled by this extractor.
  bool pools(int y, int x) const;
  std::size_t pooled_positions() const noexcept { return pooled_; }

 private:
  void patch(const Image& input, int y, int x, Eigen::Matrix<double, kFanIn, 1>& out) const;

  BackboneSpec spec_;
  Eigen::MatrixXd filters_;
  Eigen::VectorXd biases_;
  std::size_t pooled_ = 0;
};

/// Instantiates the extractor for a stream. Throws ConfigError for backbones
/// whose weights are not available.
ToyConvBackbone make_backbone(const BackboneSpec& spec, std::uint64_t seed);

/// Seed for stream `index` derived from a base seed, so two streams with the
/// same spec still get different filters.
std::uint64_t stream_seed(std::uint64_t base_seed, std::size_t index);

}  // namespace vsent
