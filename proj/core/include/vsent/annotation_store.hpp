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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsent/annotation.hpp"
#include "vsent/corpus.hpp"
#include "vsent/tags.hpp"

namespace vsent {

struct SubmitAck {
  std::size_t sequence = 0;  // 1-based position in the response log
  std::string participant_id;
  std::string image_id;
};

struct StudyStats {
  TagVocabulary vocabulary;
  std::size_t responses = 0;
  std::size_t images = 0;
  std::vector<std::size_t> tag_counts;
  std::vector<std::vector<std::size_t>> cooccurrence;
  std::map<std::string, std::size_t> extra_tags;
  std::size_t min_responses_per_image = 0;
  std::size_t max_responses_per_image = 0;
};

/// JSON document served by GET /api/stats and written to stats.json.
std::string stats_to_json(const StudyStats& stats);

/// Thread-safe annotation study state backed by an append-only log.
///
/// Store directory layout:
///
///     manifest.jsonl    image pool (snapshot taken at initialize())
///     vocab.txt         tag vocabulary
///     exclusions.txt    image ids removed from the pool by hand
///     responses.jsonl   append-only response log
///     stats.json        derived snapshot, rewritten by write_snapshot()
///
/// Reopening a store replays responses.jsonl, so every statistic is a pure
/// function of the log.
class AnnotationStore {
 public:
  /// In-memory store; nothing is persisted. Used by tests and simulations.
  AnnotationStore(std::vector<ImageRecord> manifest, TagVocabulary vocab,
                  const std::vector<std::string>& excluded_ids = {},
                  std::uint64_t seed = std::random_device{}());

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  /// Writes the manifest, vocabulary and exclusions into `dir` (creating
  /// it). Refuses to overwrite a directory that already holds responses.
  static void initialize(const std::filesystem::path& dir,
                         const std::vector<ImageRecord>& manifest, const TagVocabulary& vocab,
                         const std::vector<std::string>& excluded_ids = {});

  /// Opens an initialized store directory and replays its log.
  static std::unique_ptr<AnnotationStore> open(const std::filesystem::path& dir,
                                               std::uint64_t seed = std::random_device{}());

  /// Least-annotated eligible image, ties broken uniformly at random.
  /// Eligible: in the pool and not yet annotated by this participant.
  /// Returns nullopt when the participant has annotated every image.
  std::optional<AnnotationTask> next_task(std::string_view participant_id);

  /// Validates and appends. The duplicate-pair check and the append happen
  /// under one lock. A zero timestamp is replaced by the current time.
  ///
  /// Throws ValidationError (bad tags, unknown image) or ConflictError
  /// (participant already annotated this image).
  SubmitAck submit(AnnotationResponse response);

  std::vector<AnnotationResponse> responses() const;
  StudyStats stats() const;
  std::size_t response_count(std::string_view image_id) const;

  const TagVocabulary& vocabulary() const noexcept { return vocab_; }
  /// The annotation pool (manifest minus exclusions).
  const std::vector<ImageRecord>& pool() const noexcept { return pool_; }
  const ImageRecord* find_image(std::string_view image_id) const;

  /// Rewrites stats.json. No-op for in-memory stores.
  void write_snapshot() const;

  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  void append_locked(AnnotationResponse response, bool persist);

  TagVocabulary vocab_;
  std::vector<ImageRecord> pool_;
  std::map<std::string, std::size_t, std::less<>> pool_index_;
  std::optional<std::filesystem::path> dir_;

  mutable std::mutex mutex_;
  std::mt19937_64 rng_;
  std::vector<AnnotationResponse> log_;
  std::vector<std::size_t> counts_;  // per pool index
  std::set<std::pair<std::string, std::string>> pairs_;
};

}  // namespace vsent
