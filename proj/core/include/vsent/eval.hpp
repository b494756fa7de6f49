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
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsent/tags.hpp"

namespace vsent {

struct LabelScore {
  double accuracy = 0.0;  // percent
  std::size_t support = 0;  // positive targets

  friend bool operator==(const LabelScore&, const LabelScore&) = default;
};

struct LabelMetrics {
  /// Mean over labels of per-label bit accuracy (Hamming accuracy), percent.
  double overall_accuracy = 0.0;
  /// Percentage of images whose whole predicted vector equals the target.
  double subset_accuracy = 0.0;
  std::map<std::string, LabelScore> per_label;
  std::size_t examples = 0;
};

/// A prediction bit is prob >= threshold. Throws InvalidArgument on empty or
/// mismatched input.
LabelMetrics per_label_accuracy(std::span<const Eigen::VectorXd> probs,
                                std::span<const std::vector<std::uint8_t>> targets,
                                double threshold, const TagVocabulary& vocab);

struct MetricsReport {
  std::string model_label;
  double overall_accuracy = 0.0;
  double subset_accuracy = 0.0;
  std::map<std::string, LabelScore> per_label;
  std::string config_hash;
  std::size_t test_examples = 0;
  double threshold = 0.5;
};

/// Two-column "Model | Accuracy (%)" table, one row per report in the given
/// order, accuracies with two decimals. Throws InvalidArgument when empty.
std::string render_report(std::span<const MetricsReport> reports);

// Reports persist as JSON lines.
std::string report_to_json_line(const MetricsReport& report);
MetricsReport report_from_json_line(std::string_view line);
void append_report(const std::filesystem::path& path, const MetricsReport& report);
std::vector<MetricsReport> read_reports(const std::filesystem::path& path);

}  // namespace vsent
