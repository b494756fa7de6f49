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
#include "vsent/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "vsent/error.hpp"

namespace vsent {

std::size_t FusionConfig::fused_dim() const {
  std::size_t d = 0;
  for (const auto& s : streams) d += s.feature_dim;
  return d;
}

Eigen::VectorXd fuse(std::span<const Eigen::VectorXd> features) {
  if (features.empty()) throw InvalidArgument("fuse: no feature streams");
  Eigen::Index total = 0;
  for (const auto& f : features) total += f.size();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (const auto& f : features) {
    out.segment(at, f.size()) = f;
    at += f.size();
  }
  return out;
}

SigmoidHead SigmoidHead::random(std::size_t input_dim, std::size_t labels, std::uint64_t seed,
                                double scale) {
  SigmoidHead head(input_dim, labels);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  for (Eigen::Index r = 0; r < head.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < head.weights.cols(); ++c) head.weights(r, c) = dist(rng);
  return head;
}

double logistic(double z) {
  double p;
  if (z >= 0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  // Keep the output strictly inside (0, 1) even when exp saturates.
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

Eigen::VectorXd head_logits(const SigmoidHead& head, const Eigen::VectorXd& fused) {
  if (static_cast<std::size_t>(fused.size()) != head.input_dim())
    throw InvalidArgument("head: input has " + std::to_string(fused.size()) + " features, expected " +
                          std::to_string(head.input_dim()));
  if (head.biases.size() != head.weights.rows()) throw InvalidArgument("head: bias length mismatch");
  return head.weights * fused + head.biases;
}

Eigen::VectorXd head_forward(const SigmoidHead& head, const Eigen::VectorXd& fused) {
  return head_logits(head, fused).unaryExpr([](double z) { return logistic(z); });
}

double bce_loss(const Eigen::VectorXd& probs, std::span<const std::uint8_t> target) {
  if (static_cast<std::size_t>(probs.size()) != target.size())
    throw InvalidArgument("bce_loss: probability and target lengths differ");
  if (target.empty()) throw InvalidArgument("bce_loss: empty label vector");
  double sum = 0.0;
  for (std::size_t l = 0; l < target.size(); ++l) {
    const double p = std::clamp(probs(static_cast<Eigen::Index>(l)), kProbabilityClamp, 1.0 - kProbabilityClamp);
    sum -= target[l] ? std::log(p) : std::log(1.0 - p);
  }
  return sum / static_cast<double>(target.size());
}

HeadGradient HeadGradient::zeros_like(const SigmoidHead& head) {
  return {Eigen::MatrixXd::Zero(head.weights.rows(), head.weights.cols()),
          Eigen::VectorXd::Zero(head.biases.size())};
}

double head_loss_and_gradient(const SigmoidHead& head, const Eigen::VectorXd& fused,
                              std::span<const std::uint8_t> target, HeadGradient* grad,
                              Eigen::VectorXd* grad_input) {
  const Eigen::VectorXd p = head_forward(head, fused);
  const double loss = bce_loss(p, target);
  Eigen::VectorXd dlogit(p.size());
  for (Eigen::Index l = 0; l < p.size(); ++l)
    dlogit(l) = (p(l) - static_cast<double>(target[static_cast<std::size_t>(l)])) / static_cast<double>(p.size());
  if (grad) {
    grad->weights.noalias() += dlogit * fused.transpose();
    grad->biases += dlogit;
  }
  if (grad_input) *grad_input = head.weights.transpose() * dlogit;
  return loss;
}

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw InvalidArgument("learning_rate must be positive");
  if (batch_size == 0) throw InvalidArgument("batch_size must be positive");
}

FusionModel::FusionModel(FusionConfig config, TagVocabulary vocab, std::uint64_t backbone_seed,
                         std::uint64_t head_seed)
    : config_(std::move(config)), vocab_(std::move(vocab)), backbone_seed_(backbone_seed) {
  if (config_.streams.empty()) throw InvalidArgument("fusion config needs at least one stream");
  if (vocab_.empty()) throw InvalidArgument("model vocabulary is empty");
  for (std::size_t i = 0; i < config_.streams.size(); ++i)
    backbones_.push_back(make_backbone(config_.streams[i], stream_seed(backbone_seed_, i)));
  head_ = SigmoidHead::random(config_.fused_dim(), vocab_.size(), head_seed);
}

void FusionModel::set_head(SigmoidHead head) {
  if (head.input_dim() != config_.fused_dim() || head.labels() != vocab_.size() ||
      head.biases.size() != head.weights.rows())
    throw InvalidArgument("head shape does not match the fusion config and vocabulary");
  head_ = std::move(head);
}

std::vector<Eigen::VectorXd> FusionModel::stream_features(const Image& image) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(backbones_.size());
  for (const auto& b : backbones_) out.push_back(b.extract(image));
  return out;
}

Eigen::VectorXd FusionModel::fused_features(const Image& image) const {
  const auto streams = stream_features(image);
  return fuse(streams);
}

Eigen::VectorXd FusionModel::predict_proba(const Image& image) const {
  return head_forward(head_, fused_features(image));
}

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

TrainingResult fine_tune(FusionModel& model, std::span<const LabeledImage> data,
                         const TrainingConfig& config) {
  config.validate();
  if (data.empty()) throw TrainingError("fine_tune: empty dataset");
  const std::size_t labels = model.vocabulary().size();
  for (const auto& ex : data) {
    if (ex.labels.size() != labels)
      throw TrainingError("fine_tune: label vector of " + ex.id + " has length " +
                          std::to_string(ex.labels.size()) + ", expected " + std::to_string(labels));
  }

  auto& backbones = model.backbones();
  const bool frozen = config.freeze_backbones;
  const std::size_t n = data.size();

  // Frozen: fused features once. Unfrozen: per-stream resized inputs.
  std::vector<Eigen::VectorXd> features;
  std::vector<std::vector<Image>> inputs;
  if (frozen) {
    features.reserve(n);
    for (const auto& ex : data) features.push_back(model.fused_features(ex.image));
  } else {
    inputs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& b : backbones) {
        const int s = b.spec().input_size;
        inputs[i].push_back(resize(data[i].image, s, s));
      }
    }
  }

  auto fused_of = [&](std::size_t i) -> Eigen::VectorXd {
    if (frozen) return features[i];
    std::vector<Eigen::VectorXd> f;
    for (std::size_t s = 0; s < backbones.size(); ++s) f.push_back(backbones[s].forward(inputs[i][s]));
    return fuse(f);
  };

  auto dataset_loss = [&]() {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += bce_loss(head_forward(model.head(), fused_of(i)), data[i].labels);
    return sum / static_cast<double>(n);
  };

  TrainingResult result;
  result.initial_loss = dataset_loss();
  if (!finite(result.initial_loss)) throw TrainingError("fine_tune: initial loss is not finite");

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  SigmoidHead head = model.head();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      auto grad = HeadGradient::zeros_like(head);
      std::vector<ToyConvBackbone::Gradient> bgrad;
      if (!frozen)
        for (const auto& b : backbones) bgrad.push_back(b.zero_gradient());

      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        const Eigen::VectorXd x = fused_of(i);
        Eigen::VectorXd gx;
        const double loss = head_loss_and_gradient(head, x, data[i].labels, &grad, frozen ? nullptr : &gx);
        if (!finite(loss)) {
          std::ostringstream os;
          os << "fine_tune: non-finite loss at epoch " << epoch + 1 << ", example " << data[i].id;
          throw TrainingError(os.str());
        }
        if (!frozen) {
          Eigen::Index at = 0;
          for (std::size_t s = 0; s < backbones.size(); ++s) {
            const auto d = static_cast<Eigen::Index>(backbones[s].spec().feature_dim);
            backbones[s].backward(inputs[i][s], gx.segment(at, d), bgrad[s]);
            at += d;
          }
        }
      }

      const double step = config.learning_rate / static_cast<double>(stop - start);
      head.weights -= step * grad.weights;
      head.biases -= step * grad.biases;
      if (!frozen) {
        for (std::size_t s = 0; s < backbones.size(); ++s) {
          backbones[s].set_parameters(backbones[s].filters() - step * bgrad[s].filters,
                                      backbones[s].biases() - step * bgrad[s].biases);
        }
      }
    }
    model.set_head(head);
    const double loss = dataset_loss();
    if (!finite(loss))
      throw TrainingError("fine_tune: training loss became non-finite after epoch " + std::to_string(epoch + 1));
    result.epoch_loss.push_back(loss);
  }
  return result;
}

Prediction threshold_probabilities(const Eigen::VectorXd& probs, const TagVocabulary& vocab,
                                   double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("threshold must lie in (0, 1)");
  if (static_cast<std::size_t>(probs.size()) != vocab.size())
    throw InvalidArgument("probability vector does not match vocabulary");
  Prediction p;
  for (Eigen::Index l = 0; l < probs.size(); ++l) {
    p.probabilities.push_back(probs(l));
    if (probs(l) >= threshold) p.tags.push_back(vocab[static_cast<std::size_t>(l)]);
  }
  return p;
}

Prediction predict_tags(const FusionModel& model, const Image& image, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("threshold must lie in (0, 1)");
  return threshold_probabilities(model.predict_proba(image), model.vocabulary(), threshold);
}

}  // namespace vsent
