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

// Synthetic disaster-like scenes whose labels depend on a foreground object
// and on the background, for exercising fusion and training end to end.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "vsent/dataset.hpp"
#include "vsent/image.hpp"
#include "vsent/model.hpp"
#include "vsent/tags.hpp"

namespace vsent {

struct SyntheticOptions {
  std::size_t count = 200;
  int size = 32;
  /// Per-pixel Gaussian noise standard deviation.
  double pixel_noise = 0.04;
  /// Per-image uniform colour jitter half-width.
  double colour_jitter = 0.08;
  std::uint64_t seed = 1;
};

/// A scene is a background colour with a centred square covering the central
/// half of the frame. The square's colour encodes whether the object cue is
/// present and the background colour whether the scene cue is present.
struct SyntheticScene {
  Image image;
  bool object = false;
  bool background = false;
  std::vector<std::uint8_t> labels;
};

/// destruction (object cue), hope (scene cue), shock (both).
TagVocabulary synthetic_vocabulary();

/// Cue pairs are balanced: scene i gets object = i % 2, background = (i / 2) % 2
/// before shuffling.
std::vector<SyntheticScene> make_synthetic_scenes(const SyntheticOptions& options);

std::vector<LabeledImage> to_labeled_images(const std::vector<SyntheticScene>& scenes);

/// Writes PNGs under <dir>/images and a dataset directory layout. The object
/// cue doubles as the stratification key.
DatasetSplit write_synthetic_dataset(const std::filesystem::path& dir,
                                     const std::vector<SyntheticScene>& scenes,
                                     SplitRatios ratios, std::uint64_t seed);

}  // namespace vsent
