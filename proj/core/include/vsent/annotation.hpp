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

// Crowd-sourced annotation data model and the statistics computed over it:
// per-tag counts, tag co-occurrence and thresholded ground-truth vectors.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsent/tags.hpp"

namespace vsent {

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

/// ISO-8601 UTC with millisecond precision, e.g. "2026-10-15T11:35:00.250Z".
std::string format_timestamp(Timestamp t);
/// Accepts the format above, with or without the fractional part.
Timestamp parse_timestamp(std::string_view text);
Timestamp now_utc();

struct AnnotationTask {
  std::string image_id;
  std::string image_uri;
  TagVocabulary vocabulary;
};

struct AnnotationResponse {
  std::string participant_id;
  std::string image_id;
  std::set<std::string> selected_tags;
  std::vector<std::string> extra_tags;
  Timestamp timestamp{};

  friend bool operator==(const AnnotationResponse&, const AnnotationResponse&) = default;
};

/// Checks the response-local invariants: non-empty ids, selected tags drawn
/// from `vocab`, and at least one selected or free-text tag. Throws
/// ValidationError.
void validate_response(const AnnotationResponse& response, const TagVocabulary& vocab);

std::string response_to_json_line(const AnnotationResponse& response);
/// Throws DataError on malformed input.
AnnotationResponse response_from_json_line(std::string_view line);

/// counts[i] = number of responses selecting vocab[i]. Tags outside the
/// vocabulary are ignored.
std::vector<std::size_t> tag_counts(std::span<const AnnotationResponse> responses,
                                    const TagVocabulary& vocab);

/// Tag -> count view of tag_counts().
std::map<std::string, std::size_t> tag_count_map(std::span<const AnnotationResponse> responses,
                                                 const TagVocabulary& vocab);

/// Free-text tags, trimmed and lowercased, with the number of responses that
/// used each. They are reported but never enter label vectors.
std::map<std::string, std::size_t> extra_tag_counts(std::span<const AnnotationResponse> responses);

/// Square count matrix over a vocabulary. Entry (i, i) is the number of
/// responses containing tag i; entry (i, j) the number containing both.
class CooccurrenceMatrix {
 public:
  explicit CooccurrenceMatrix(TagVocabulary vocab);

  const TagVocabulary& vocabulary() const noexcept { return vocab_; }
  std::size_t size() const noexcept { return vocab_.size(); }

  std::size_t at(std::size_t i, std::size_t j) const { return counts_[i * size() + j]; }
  std::size_t at(std::string_view a, std::string_view b) const;

  /// Adds one response's tag index set: every diagonal and every unordered
  /// pair gets +1.
  void add(std::span<const std::size_t> tag_indices);

  std::vector<std::vector<std::size_t>> rows() const;

 private:
  TagVocabulary vocab_;
  std::vector<std::size_t> counts_;
};

CooccurrenceMatrix cooccurrence(std::span<const AnnotationResponse> responses,
                                const TagVocabulary& vocab);

/// Count table with tags in alphabetical order and capitalized, e.g.
///
///     | Sentiments/tags | Count |
///     |-----------------|-------|
///     | Destruction     |   871 |
std::string render_tag_count_table(const std::map<std::string, std::size_t>& counts);

struct LabelVector {
  std::string image_id;
  std::vector<std::uint8_t> bits;

  bool any() const;
  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

struct Shortfall {
  std::string image_id;
  std::size_t responses = 0;
};

struct GroundTruth {
  /// One vector per image that met the response minimum, in image-id order,
  /// including images whose vector came out all zero.
  std::vector<LabelVector> labels;
  /// Images among `labels` with no bit set. They are not admitted to a
  /// training set.
  std::vector<std::string> all_zero;
  /// Images with fewer than the minimum number of distinct annotators.
  std::vector<Shortfall> shortfall;

  /// labels minus all-zero vectors.
  std::vector<LabelVector> admitted() const;
};

struct GroundTruthOptions {
  std::size_t min_responses = 5;
  /// Images to consider in addition to those seen in responses, so images
  /// nobody annotated still show up in the shortfall report.
  std::vector<std::string> image_ids;
};

/// Bit t of an image is set iff the fraction of its responses selecting t is
/// at least `threshold`. Responses are counted once per participant.
///
/// Throws InvalidArgument unless 0 < threshold <= 1.
GroundTruth derive_ground_truth(std::span<const AnnotationResponse> responses,
                                const TagVocabulary& vocab, double threshold,
                                const GroundTruthOptions& options = {});

}  // namespace vsent
