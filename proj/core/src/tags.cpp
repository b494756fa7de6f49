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
#include "vsent/tags.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_set>

#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

TagVocabulary::TagVocabulary(std::vector<std::string> tags) : tags_(std::move(tags)) {
  std::unordered_set<std::string> seen;
  for (const auto& t : tags_) {
    if (t.empty()) throw InvalidArgument("vocabulary: empty tag");
    if (text::to_lower(t) != t) throw InvalidArgument("vocabulary: tag not lowercase: " + t);
    if (text::trim(t) != t) throw InvalidArgument("vocabulary: tag has surrounding space: " + t);
    if (!seen.insert(t).second) throw InvalidArgument("vocabulary: duplicate tag: " + t);
  }
}

TagVocabulary TagVocabulary::disaster_default() {
  return TagVocabulary({"pain", "shock", "destruction", "rescue", "hope", "happiness", "neutral"});
}

std::optional<std::size_t> TagVocabulary::index_of(std::string_view tag) const {
  const auto it = std::find(tags_.begin(), tags_.end(), tag);
  if (it == tags_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - tags_.begin());
}

TagVocabulary read_vocabulary(const std::filesystem::path& path) {
  auto tags = text::read_list_file(path);
  if (tags.empty()) throw DataError(path.string(), "vocabulary file is empty");
  try {
    return TagVocabulary(std::move(tags));
  } catch (const InvalidArgument& e) {
    throw DataError(path.string(), e.what());
  }
}

void write_vocabulary(const std::filesystem::path& path, const TagVocabulary& vocab) {
  text::write_list_file(path, vocab.tags());
}

std::vector<std::string> tokenize_metadata(const std::vector<std::string>& raw_tokens) {
  std::vector<std::string> out;
  for (const auto& raw : raw_tokens) {
    for (const auto& word : text::split_whitespace(raw)) {
      std::string tok;
      for (char c : word) {
        if (std::ispunct(static_cast<unsigned char>(c))) continue;
        tok.push_back(c);
      }
      tok = text::to_lower(tok);
      if (tok.size() >= 2) out.push_back(std::move(tok));
    }
  }
  return out;
}

std::vector<std::string> tokenize_metadata(const ImageRecord& record) {
  return tokenize_metadata(record.metadata_tokens);
}

std::vector<RankedToken> rank_candidates(const std::vector<ImageRecord>& records,
                                         const std::set<std::string>& stopwords,
                                         std::size_t min_count) {
  if (min_count < 1) throw InvalidArgument("rank_candidates: min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) {
    auto toks = tokenize_metadata(r);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (auto& t : toks) {
      if (!stopwords.contains(t)) ++counts[std::move(t)];
    }
  }
  std::vector<RankedToken> out;
  for (auto& [tok, n] : counts) {
    if (n >= min_count) out.push_back({tok, n});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedToken& a, const RankedToken& b) { return a.count > b.count; });
  return out;
}

TagVocabulary build_vocabulary(const std::vector<RankedToken>& ranked,
                               const std::vector<std::string>& curated, std::size_t size_limit) {
  if (size_limit < curated.size())
    throw InvalidArgument("build_vocabulary: size_limit smaller than curated list");
  std::unordered_set<std::string> seen;
  for (const auto& c : curated) {
    if (!seen.insert(c).second) throw InvalidArgument("build_vocabulary: duplicate curated tag " + c);
  }
  std::vector<std::string> tags = curated;
  for (const auto& r : ranked) {
    if (tags.size() >= size_limit) break;
    if (seen.insert(r.token).second) tags.push_back(r.token);
  }
  return TagVocabulary(std::move(tags));
}

std::set<std::string> read_stopwords(const std::filesystem::path& path) {
  std::set<std::string> out;
  for (const auto& w : text::read_list_file(path)) out.insert(text::to_lower(w));
  return out;
}

}  // namespace vsent
