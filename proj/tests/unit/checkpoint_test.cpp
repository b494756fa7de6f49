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
#include "vsent/checkpoint.hpp"
#include "vsent/error.hpp"
#include "vsent/synthetic.hpp"
#include "vsent/text.hpp"

using namespace vsent;

TEST_CASE("checkpoint round trip preserves predictions exactly") {
  vsent::testing::TempDir tmp;
  SyntheticOptions opt;
  opt.count = 16;
  opt.size = 16;
  const auto data = to_labeled_images(make_synthetic_scenes(opt));
  FusionConfig cfg;
  cfg.streams = {parse_stream_spec("imagenet:toy:5"), parse_stream_spec("places:toy:4")};
  for (auto& s : cfg.streams) s.input_size = 16;
  FusionModel model(cfg, synthetic_vocabulary(), 3, 4);
  TrainingConfig tc;
  tc.epochs = 2;
  tc.learning_rate = 0.3;
  tc.freeze_backbones = false;
  const auto result = fine_tune(model, data, tc);

  save_checkpoint(tmp / "m.ckpt.json", {model, tc, result.epoch_loss, "somewhere"});
  const auto back = load_checkpoint(tmp / "m.ckpt.json");
  CHECK(back.model.config().streams == cfg.streams);
  CHECK(back.model.vocabulary() == model.vocabulary());
  CHECK(back.training.epochs == 2);
  CHECK_FALSE(back.training.freeze_backbones);
  CHECK(back.epoch_loss == result.epoch_loss);
  CHECK(back.dataset == "somewhere");
  CHECK(back.model.backbones()[0].filters() == model.backbones()[0].filters());
  for (const auto& ex : data) CHECK(back.model.predict_proba(ex.image) == model.predict_proba(ex.image));

  text::write_file(tmp / "bad.json", R"({"format": "something-else"})");
  CHECK_THROWS_AS(load_checkpoint(tmp / "bad.json"), DataError);
  CHECK_THROWS(load_checkpoint(tmp / "absent.json"));
}
