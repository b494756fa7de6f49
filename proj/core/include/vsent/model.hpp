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

// Multi-label classifier: early fusion of stream features, a per-label
// sigmoid head and the mean binary cross-entropy objective.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsent/backbone.hpp"
#include "vsent/image.hpp"
#include "vsent/tags.hpp"

namespace vsent {

inline constexpr double kProbabilityClamp = 1e-7;

struct FusionConfig {
  std::vector<BackboneSpec> streams;

  /// Sum of stream feature dims.
  std::size_t fused_dim() const;
};

/// Concatenates stream features in order. Throws InvalidArgument when empty.
Eigen::VectorXd fuse(std::span<const Eigen::VectorXd> features);

/// Per-label logistic output layer. weights is L x D (row l scores label l),
/// biases has length L.
struct SigmoidHead {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;

  SigmoidHead() = default;
  SigmoidHead(std::size_t input_dim, std::size_t labels)
      : weights(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels),
                                      static_cast<Eigen::Index>(input_dim))),
        biases(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(labels))) {}

  /// Gaussian weights with standard deviation `scale`, zero biases.
  static SigmoidHead random(std::size_t input_dim, std::size_t labels, std::uint64_t seed,
                            double scale = 0.01);

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }
  std::size_t labels() const noexcept { return static_cast<std::size_t>(weights.rows()); }
};

double logistic(double z);

/// Per-label logits W x + b.
Eigen::VectorXd head_logits(const SigmoidHead& head, const Eigen::VectorXd& fused);

/// logistic(W x + b), each component in (0, 1) independently. Throws
/// InvalidArgument on dimension mismatch.
Eigen::VectorXd head_forward(const SigmoidHead& head, const Eigen::VectorXd& fused);

/// Mean over labels of -[y log p + (1 - y) log(1 - p)], with p clamped to
/// [1e-7, 1 - 1e-7]. Throws InvalidArgument on length mismatch.
double bce_loss(const Eigen::VectorXd& probs, std::span<const std::uint8_t> target);

struct HeadGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;

  static HeadGradient zeros_like(const SigmoidHead& head);
};

/// bce_loss(head_forward(head, fused), target) and its gradient with respect
/// to the head parameters (added into *grad) and optionally the fused input
/// (written to *grad_input). Uses d(loss)/d(logit) = (p - y) / L.
double head_loss_and_gradient(const SigmoidHead& head, const Eigen::VectorXd& fused,
                              std::span<const std::uint8_t> target, HeadGradient* grad,
                              Eigen::VectorXd* grad_input = nullptr);

struct TrainingConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  bool freeze_backbones = true;

  /// Throws InvalidArgument for non-positive rate or batch size.
  void validate() const;
};

/// Backbones, fusion and head, bound to a vocabulary.
class FusionModel {
 public:
  FusionModel() = default;

  /// Builds each stream's backbone from `backbone_seed` and a head of
  /// Gaussian weights (std 0.01) seeded from `head_seed`.
  FusionModel(FusionConfig config, TagVocabulary vocab, std::uint64_t backbone_seed,
              std::uint64_t head_seed);

  const FusionConfig& config() const noexcept { return config_; }
  const TagVocabulary& vocabulary() const noexcept { return vocab_; }
  std::uint64_t backbone_seed() const noexcept { return backbone_seed_; }

  const std::vector<ToyConvBackbone>& backbones() const noexcept { return backbones_; }
  std::vector<ToyConvBackbone>& backbones() noexcept { return backbones_; }

  const SigmoidHead& head() const noexcept { return head_; }
  void set_head(SigmoidHead head);

  /// Per-stream features for an image, in stream order.
  std::vector<Eigen::VectorXd> stream_features(const Image& image) const;
  Eigen::VectorXd fused_features(const Image& image) const;
  Eigen::VectorXd predict_proba(const Image& image) const;

 private:
  FusionConfig config_;
  TagVocabulary vocab_;
  std::uint64_t backbone_seed_ = 0;
  std::vector<ToyConvBackbone> backbones_;
  SigmoidHead head_;
};

struct LabeledImage {
  std::string id;
  Image image;
  std::vector<std::uint8_t> labels;
};

struct TrainingResult {
  /// Mean bce_loss over the training set, evaluated after each epoch.
  std::vector<double> epoch_loss;
  double initial_loss = 0.0;
};

/// Mini-batch SGD on the mean BCE loss. Batches are drawn from a permutation
/// reshuffled every epoch with `config.seed`. With frozen backbones only the
/// head moves and features are computed once. With unfrozen backbones the
/// convolution filters are updated too.
///
/// Throws TrainingError on an empty dataset, label length mismatch or a
/// non-finite loss.
TrainingResult fine_tune(FusionModel& model, std::span<const LabeledImage> data,
                         const TrainingConfig& config);

struct Prediction {
  std::vector<double> probabilities;
  std::vector<std::string> tags;

  /// True when no probability reached the threshold.
  bool no_confident_tag() const noexcept { return tags.empty(); }
};

/// Tags with probability >= threshold, in vocabulary order. Throws
/// InvalidArgument unless 0 < threshold < 1.
Prediction predict_tags(const FusionModel& model, const Image& image, double threshold);
Prediction threshold_probabilities(const Eigen::VectorXd& probs, const TagVocabulary& vocab,
                                   double threshold);

}  // namespace vsent
