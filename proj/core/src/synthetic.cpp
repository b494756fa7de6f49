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
#include "vsent/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <random>

#include "vsent/error.hpp"

namespace vsent {

namespace {

using Rgb = std::array<double, 3>;

// Background: flooded vs dry ground. Object: debris vs intact structure.
constexpr Rgb kFlooded{0.30, 0.35, 0.55};
constexpr Rgb kDry{0.65, 0.60, 0.40};
constexpr Rgb kDebris{0.75, 0.30, 0.20};
constexpr Rgb kIntact{0.30, 0.65, 0.35};

}  // namespace

TagVocabulary synthetic_vocabulary() { return TagVocabulary({"destruction", "hope", "shock"}); }

std::vector<SyntheticScene> make_synthetic_scenes(const SyntheticOptions& options) {
  if (options.size < 8) throw InvalidArgument("synthetic scenes need size >= 8");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(-options.colour_jitter, options.colour_jitter);
  std::normal_distribution<double> noise(0.0, options.pixel_noise);

  const int s = options.size;
  const int lo = s / 4, hi = s - s / 4;
  std::vector<SyntheticScene> scenes;
  scenes.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    SyntheticScene sc;
    sc.object = i % 2 == 1;
    sc.background = (i / 2) % 2 == 1;
    sc.labels = {static_cast<std::uint8_t>(sc.object), static_cast<std::uint8_t>(sc.background),
                 static_cast<std::uint8_t>(sc.object && sc.background)};
    Rgb bg = sc.background ? kFlooded : kDry;
    Rgb fg = sc.object ? kDebris : kIntact;
    for (auto& c : bg) c += jitter(rng);
    for (auto& c : fg) c += jitter(rng);
    sc.image = Image(s, s);
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        const bool centre = y >= lo && y < hi && x >= lo && x < hi;
        const Rgb& base = centre ? fg : bg;
        for (int c = 0; c < Image::kChannels; ++c)
          sc.image.at(y, x, c) = static_cast<float>(std::clamp(base[static_cast<std::size_t>(c)] + noise(rng), 0.0, 1.0));
      }
    }
    scenes.push_back(std::move(sc));
  }
  std::shuffle(scenes.begin(), scenes.end(), rng);
  return scenes;
}

std::vector<LabeledImage> to_labeled_images(const std::vector<SyntheticScene>& scenes) {
  std::vector<LabeledImage> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "syn-%05zu", i);
    out.push_back({id, scenes[i].image, scenes[i].labels});
  }
  return out;
}

DatasetSplit write_synthetic_dataset(const std::filesystem::path& dir,
                                     const std::vector<SyntheticScene>& scenes, SplitRatios ratios,
                                     std::uint64_t seed) {
  std::filesystem::create_directories(dir / "images");
  const auto labeled = to_labeled_images(scenes);
  std::vector<std::string> ids, strata;
  std::map<std::string, DatasetExample> examples;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto rel = "images/" + labeled[i].id + ".png";
    save_png(dir / rel, labeled[i].image);
    const std::string stratum = scenes[i].object ? "debris" : "intact";
    ids.push_back(labeled[i].id);
    strata.push_back(stratum);
    examples[labeled[i].id] = {labeled[i].id, rel, stratum, labeled[i].labels};
  }
  const auto split = split_dataset(ids, strata, ratios, seed);
  Dataset ds;
  ds.vocabulary = synthetic_vocabulary();
  ds.meta.ratios = ratios;
  ds.meta.seed = seed;
  for (const auto& id : split.train) ds.train.push_back(examples.at(id));
  for (const auto& id : split.val) ds.val.push_back(examples.at(id));
  for (const auto& id : split.test) ds.test.push_back(examples.at(id));
  write_dataset(dir, ds);
  return split;
}

}  // namespace vsent
