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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsent/dataset.hpp"
#include "vsent/eval.hpp"
#include "vsent/model.hpp"

namespace vsent {

struct ExperimentConfig {
  std::filesystem::path dataset_dir;
  std::vector<BackboneSpec> streams;
  TrainingConfig training;
  double threshold = 0.5;
  std::uint64_t backbone_seed = 0;
  /// Defaults to describe_streams(streams).
  std::string model_label;
  /// When set, the report is appended to <out_dir>/reports.jsonl, the table
  /// rewritten to <out_dir>/report.txt and the checkpoint saved to
  /// <out_dir>/<first 16 hex digits of config_hash>.ckpt.json.
  std::optional<std::filesystem::path> out_dir;
};

/// SHA-256 over a canonical JSON rendering of the configuration together with
/// the dataset's split metadata and example ids.
std::string config_hash(const ExperimentConfig& config, const Dataset& dataset);

/// Decodes every example of a split. Throws DataError naming the image.
std::vector<LabeledImage> load_examples(const std::vector<DatasetExample>& examples);

/// Scores a trained model on labelled images.
MetricsReport evaluate(const FusionModel& model, std::span<const LabeledImage> data,
                       double threshold, std::string model_label);

/// Trains on the train split, evaluates on the test split. Throws ConfigError
/// when the dataset is missing or a test image also appears in training.
MetricsReport run_experiment(const ExperimentConfig& config);

}  // namespace vsent
