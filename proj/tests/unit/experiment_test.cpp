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
#include <doctest.h>

#include "test_support.hpp"
#include "vsent/error.hpp"
#include "vsent/experiment.hpp"
#include "vsent/synthetic.hpp"
#include "vsent/text.hpp"

using namespace vsent;
using vsent::testing::TempDir;

namespace {

ExperimentConfig small_config(const std::filesystem::path& dataset) {
  ExperimentConfig c;
  c.dataset_dir = dataset;
  c.streams = {parse_stream_spec("imagenet:toy:6"), parse_stream_spec("places:toy:6")};
  for (auto& s : c.streams) s.input_size = 16;
  c.training.learning_rate = 1.0;
  c.training.epochs = 5;
  c.training.batch_size = 8;
  c.training.seed = 2;
  c.backbone_seed = 9;
  return c;
}

}  // namespace

TEST_CASE("run_experiment is deterministic and writes its artifacts") {
  TempDir tmp;
  SyntheticOptions opt;
  opt.count = 40;
  opt.size = 16;
  write_synthetic_dataset(tmp / "ds", make_synthetic_scenes(opt), {0.6, 0.2, 0.2}, 1);

  auto cfg = small_config(tmp / "ds");
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.config_hash.size() == 64);
  CHECK(a.overall_accuracy == b.overall_accuracy);
  CHECK(a.per_label == b.per_label);
  CHECK(a.test_examples == 8);
  CHECK(a.model_label == "Fusion (Toy ImageNet + Toy places)");

  auto other = cfg;
  other.training.seed = 3;
  CHECK(config_hash(other, read_dataset(cfg.dataset_dir)) != a.config_hash);

  cfg.out_dir = tmp / "out";
  cfg.model_label = "fused";
  run_experiment(cfg);
  CHECK(std::filesystem::exists(tmp / "out" / (a.config_hash.substr(0, 16) + ".ckpt.json")));
  CHECK(read_reports(tmp / "out" / "reports.jsonl").size() == 1);
  CHECK(text::read_file(tmp / "out" / "report.txt").find("| fused ") != std::string::npos);
}

TEST_CASE("run_experiment rejects overlapping splits and missing inputs") {
  TempDir tmp;
  SyntheticOptions opt;
  opt.count = 12;
  opt.size = 16;
  write_synthetic_dataset(tmp / "ds", make_synthetic_scenes(opt), {0.6, 0.2, 0.2}, 1);
  auto ds = read_dataset(tmp / "ds");
  ds.test.push_back(ds.train.front());
  write_dataset(tmp / "leaky", ds);
  CHECK_THROWS_AS(run_experiment(small_config(tmp / "leaky")), ConfigError);
  CHECK_THROWS_AS(run_experiment(small_config(tmp / "none")), ConfigError);
  auto no_streams = small_config(tmp / "ds");
  no_streams.streams.clear();
  CHECK_THROWS_AS(run_experiment(no_streams), ConfigError);
}
