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
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vsent/corpus.hpp"

namespace vsent {

/// Ordered set of sentiment labels. Tags are unique, non-empty and lowercase;
/// the position of a tag is its label index everywhere downstream.
class TagVocabulary {
 public:
  TagVocabulary() = default;

  /// Throws InvalidArgument on empty, non-lowercase or duplicate tags.
  explicit TagVocabulary(std::vector<std::string> tags);

  /// pain, shock, destruction, rescue, hope, happiness, neutral.
  static TagVocabulary disaster_default();

  const std::vector<std::string>& tags() const noexcept { return tags_; }
  std::size_t size() const noexcept { return tags_.size(); }
  bool empty() const noexcept { return tags_.empty(); }
  const std::string& operator[](std::size_t i) const { return tags_[i]; }

  std::optional<std::size_t> index_of(std::string_view tag) const;
  bool contains(std::string_view tag) const { return index_of(tag).has_value(); }

  friend bool operator==(const TagVocabulary&, const TagVocabulary&) = default;

 private:
  std::vector<std::string> tags_;
};

/// Vocabulary file: one tag per line, UTF-8.
TagVocabulary read_vocabulary(const std::filesystem::path& path);
void write_vocabulary(const std::filesystem::path& path, const TagVocabulary& vocab);

struct RankedToken {
  std::string token;
  std::size_t count = 0;

  friend bool operator==(const RankedToken&, const RankedToken&) = default;
};

/// Lowercases, removes ASCII punctuation and drops tokens shorter than two
/// bytes. A raw token containing whitespace contributes each word.
std::vector<std::string> tokenize_metadata(const ImageRecord& record);
std::vector<std::string> tokenize_metadata(const std::vector<std::string>& raw_tokens);

/// Counts, for every token, the number of records whose tokenized metadata
/// contains it, removes stopwords and keeps tokens with count >= min_count.
/// Sorted by count descending, then lexicographically.
///
/// Throws InvalidArgument when min_count < 1.
std::vector<RankedToken> rank_candidates(const std::vector<ImageRecord>& records,
                                         const std::set<std::string>& stopwords,
                                         std::size_t min_count);

/// Curated tags first, then the highest-ranked tokens not already present,
/// until the vocabulary holds `size_limit` tags.
///
/// Throws InvalidArgument when `curated` has duplicates or is longer than
/// `size_limit`.
TagVocabulary build_vocabulary(const std::vector<RankedToken>& ranked,
                               const std::vector<std::string>& curated,
                               std::size_t size_limit);

/// Stopword file: one word per line, '#' comments allowed. Entries are
/// lowercased.
std::set<std::string> read_stopwords(const std::filesystem::path& path);

}  // namespace vsent
