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

// Train/val/test dataset layout shared by the annotation exporter, the
// synthetic generator and the trainer.
//
//     <dir>/vocab.txt
//     <dir>/train.jsonl, val.jsonl, test.jsonl
//         {"id": ..., "path": ..., "disaster_type": ..., "labels": [0, 1, ...]}
//     <dir>/dataset.json   split ratios, seed, threshold and bookkeeping
//
// Relative image paths are resolved against <dir>.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vsent/annotation.hpp"
#include "vsent/corpus.hpp"
#include "vsent/tags.hpp"

namespace vsent {

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

/// Parses "0.6,0.2,0.2". Throws InvalidArgument.
SplitRatios parse_split_ratios(std::string_view text);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

struct DatasetExample {
  std::string id;
  std::string path;
  std::string disaster_type;
  std::vector<std::uint8_t> labels;
};

struct DatasetMeta {
  SplitRatios ratios;
  std::uint64_t seed = 0;
  std::optional<double> threshold;
  std::vector<std::string> all_zero;
  std::vector<Shortfall> shortfall;
};

struct Dataset {
  TagVocabulary vocabulary;
  std::vector<DatasetExample> train;
  std::vector<DatasetExample> val;
  std::vector<DatasetExample> test;
  DatasetMeta meta;
};

/// Deterministic stratified split. Images are grouped by disaster_type
/// (sorted), shuffled within each group with `seed`, and dealt in that order
/// to whichever split is furthest behind its quota. Split sizes are the
/// largest-remainder apportionment of the image count, with every split
/// getting at least one image.
///
/// Throws InvalidArgument when ratios are not positive or do not sum to 1,
/// or when fewer than three images are given.
DatasetSplit split_dataset(const std::vector<std::string>& image_ids,
                           const std::vector<std::string>& strata, SplitRatios ratios,
                           std::uint64_t seed);

/// Splits the labelled images (manifest order is irrelevant) and writes the
/// dataset directory. Images missing from the manifest raise ConfigError.
DatasetSplit export_dataset(const std::vector<LabelVector>& labels,
                            const std::vector<ImageRecord>& manifest, const TagVocabulary& vocab,
                            SplitRatios ratios, std::uint64_t seed,
                            const std::filesystem::path& out_dir, DatasetMeta meta = {});

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

/// Throws ConfigError when the directory or any required file is missing.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace vsent
