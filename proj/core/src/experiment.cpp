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
#include "vsent/experiment.hpp"

#include <set>

#include <json.hpp>

#include "vsent/checkpoint.hpp"
#include "vsent/digest.hpp"
#include "vsent/error.hpp"
#include "vsent/log.hpp"
#include "vsent/text.hpp"

namespace vsent {

namespace fs = std::filesystem;
using nlohmann::json;

std::string config_hash(const ExperimentConfig& config, const Dataset& dataset) {
  json streams = json::array();
  for (const auto& s : config.streams)
    streams.push_back({{"name", s.name},
                       {"domain", std::string(to_string(s.domain))},
                       {"feature_dim", s.feature_dim},
                       {"input_size", s.input_size}});
  auto ids = [](const std::vector<DatasetExample>& v) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.id);
    return out;
  };
  const auto& t = config.training;
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  json j = {{"streams", streams},
            {"backbone_seed", config.backbone_seed},
            {"training",
             {{"learning_rate", t.learning_rate},
              {"epochs", t.epochs},
              {"batch_size", t.batch_size},
              {"seed", t.seed},
              {"freeze_backbones", t.freeze_backbones}}},
            {"threshold", config.threshold},
            {"vocabulary", dataset.vocabulary.tags()},
            {"split", {dataset.meta.ratios.train, dataset.meta.ratios.val, dataset.meta.ratios.test}},
            {"split_seed", dataset.meta.seed},
            {"train_ids", ids(dataset.train)},
            {"test_ids", ids(dataset.test)}};
  return sha256_hex(j.dump());
}

std::vector<LabeledImage> load_examples(const std::vector<DatasetExample>& examples) {
  std::vector<LabeledImage> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back({e.id, load_image(e.path, e.id), e.labels});
  return out;
}

MetricsReport evaluate(const FusionModel& model, std::span<const LabeledImage> data, double threshold,
                       std::string model_label) {
  std::vector<Eigen::VectorXd> probs;
  std::vector<std::vector<std::uint8_t>> targets;
  for (const auto& ex : data) {
    probs.push_back(model.predict_proba(ex.image));
    targets.push_back(ex.labels);
  }
  const auto m = per_label_accuracy(probs, targets, threshold, model.vocabulary());
  MetricsReport r;
  r.model_label = std::move(model_label);
  r.overall_accuracy = m.overall_accuracy;
  r.subset_accuracy = m.subset_accuracy;
  r.per_label = m.per_label;
  r.test_examples = m.examples;
  r.threshold = threshold;
  return r;
}

MetricsReport run_experiment(const ExperimentConfig& config) {
  if (config.streams.empty()) throw ConfigError("experiment has no feature streams");
  if (!fs::exists(config.dataset_dir))
    throw ConfigError("dataset not found: " + config.dataset_dir.string());
  const auto dataset = read_dataset(config.dataset_dir);
  if (dataset.train.empty() || dataset.test.empty())
    throw ConfigError("dataset needs non-empty train and test splits");

  std::set<std::string> train_ids;
  for (const auto& e : dataset.train) train_ids.insert(e.id);
  for (const auto& e : dataset.test) {
    if (train_ids.contains(e.id)) throw ConfigError("test image also in training split: " + e.id);
  }

  const auto train = load_examples(dataset.train);
  const auto test = load_examples(dataset.test);

  FusionModel model(FusionConfig{config.streams}, dataset.vocabulary, config.backbone_seed,
                    config.training.seed);
  const auto result = fine_tune(model, train, config.training);

  const auto label = config.model_label.empty() ? describe_streams(config.streams) : config.model_label;
  auto report = evaluate(model, test, config.threshold, label);
  report.config_hash = config_hash(config, dataset);

  if (config.out_dir) {
    fs::create_directories(*config.out_dir);
    const auto reports_path = *config.out_dir / "reports.jsonl";
    append_report(reports_path, report);
    const auto all = read_reports(reports_path);
    text::write_file(*config.out_dir / "report.txt", render_report(all));
    save_checkpoint(*config.out_dir / (report.config_hash.substr(0, 16) + ".ckpt.json"),
                    {model, config.training, result.epoch_loss, config.dataset_dir.string()});
  }
  log::info(label + ": Hamming accuracy " + std::to_string(report.overall_accuracy) + "% on " +
            std::to_string(report.test_examples) + " test images");
  return report;
}

}  // namespace vsent
