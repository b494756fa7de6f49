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
#include "vsent/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

using nlohmann::json;

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto secs = floor<seconds>(t);
  const auto ms = (t - secs).count();
  const std::time_t tt = secs.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

Timestamp parse_timestamp(std::string_view text) {
  std::tm tm{};
  int frac = 0;
  const std::string s(text);
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                  &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6)
    throw DataError("timestamp", "not ISO-8601: " + s);
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      if (digits < 3) {
        frac = frac * 10 + (s[pos] - '0');
        ++digits;
      }
      ++pos;
    }
    while (digits < 3) {
      frac *= 10;
      ++digits;
    }
  }
  if (pos >= s.size() || s[pos] != 'Z' || pos + 1 != s.size())
    throw DataError("timestamp", "expected UTC 'Z' suffix: " + s);
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t tt = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(tt) * 1000 + frac));
}

Timestamp now_utc() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

void validate_response(const AnnotationResponse& r, const TagVocabulary& vocab) {
  if (r.participant_id.empty()) throw ValidationError("participant_id is empty");
  if (r.image_id.empty()) throw ValidationError("image_id is empty");
  for (const auto& t : r.selected_tags) {
    if (!vocab.contains(t)) throw ValidationError("selected tag not in vocabulary: " + t);
  }
  const bool any_extra = std::any_of(r.extra_tags.begin(), r.extra_tags.end(),
                                     [](const std::string& e) { return !text::trim(e).empty(); });
  if (r.selected_tags.empty() && !any_extra)
    throw ValidationError("response selects no tag and gives no extra tag");
}

std::string response_to_json_line(const AnnotationResponse& r) {
  json j = {{"participant_id", r.participant_id},
            {"image_id", r.image_id},
            {"selected_tags", r.selected_tags},
            {"extra_tags", r.extra_tags},
            {"timestamp", format_timestamp(r.timestamp)}};
  return j.dump();
}

AnnotationResponse response_from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    AnnotationResponse r;
    r.participant_id = j.at("participant_id").get<std::string>();
    r.image_id = j.at("image_id").get<std::string>();
    for (const auto& t : j.at("selected_tags")) r.selected_tags.insert(t.get<std::string>());
    r.extra_tags = j.value("extra_tags", std::vector<std::string>{});
    r.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw DataError("response", e.what());
  }
}

std::vector<std::size_t> tag_counts(std::span<const AnnotationResponse> responses,
                                    const TagVocabulary& vocab) {
  std::vector<std::size_t> counts(vocab.size(), 0);
  for (const auto& r : responses) {
    for (const auto& t : r.selected_tags) {
      if (const auto i = vocab.index_of(t)) ++counts[*i];
    }
  }
  return counts;
}

std::map<std::string, std::size_t> tag_count_map(std::span<const AnnotationResponse> responses,
                                                 const TagVocabulary& vocab) {
  const auto counts = tag_counts(responses, vocab);
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < vocab.size(); ++i) out[vocab[i]] = counts[i];
  return out;
}

std::map<std::string, std::size_t> extra_tag_counts(std::span<const AnnotationResponse> responses) {
  std::map<std::string, std::size_t> out;
  for (const auto& r : responses) {
    std::set<std::string> mine;
    for (const auto& e : r.extra_tags) {
      auto norm = text::to_lower(text::trim(e));
      if (!norm.empty()) mine.insert(std::move(norm));
    }
    for (const auto& e : mine) ++out[e];
  }
  return out;
}

CooccurrenceMatrix::CooccurrenceMatrix(TagVocabulary vocab)
    : vocab_(std::move(vocab)), counts_(vocab_.size() * vocab_.size(), 0) {}

std::size_t CooccurrenceMatrix::at(std::string_view a, std::string_view b) const {
  const auto i = vocab_.index_of(a);
  const auto j = vocab_.index_of(b);
  if (!i || !j) throw InvalidArgument("co-occurrence: unknown tag");
  return at(*i, *j);
}

void CooccurrenceMatrix::add(std::span<const std::size_t> tag_indices) {
  const std::size_t n = size();
  for (std::size_t a = 0; a < tag_indices.size(); ++a) {
    const auto i = tag_indices[a];
    ++counts_[i * n + i];
    for (std::size_t b = a + 1; b < tag_indices.size(); ++b) {
      const auto j = tag_indices[b];
      ++counts_[i * n + j];
      ++counts_[j * n + i];
    }
  }
}

std::vector<std::vector<std::size_t>> CooccurrenceMatrix::rows() const {
  std::vector<std::vector<std::size_t>> out(size());
  for (std::size_t i = 0; i < size(); ++i)
    out[i].assign(counts_.begin() + static_cast<std::ptrdiff_t>(i * size()),
                  counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * size()));
  return out;
}

CooccurrenceMatrix cooccurrence(std::span<const AnnotationResponse> responses,
                                const TagVocabulary& vocab) {
  CooccurrenceMatrix m(vocab);
  std::vector<std::size_t> idx;
  for (const auto& r : responses) {
    idx.clear();
    for (const auto& t : r.selected_tags) {
      if (const auto i = vocab.index_of(t)) idx.push_back(*i);
    }
    m.add(idx);
  }
  return m;
}

std::string render_tag_count_table(const std::map<std::string, std::size_t>& counts) {
  const std::string h1 = "Sentiments/tags", h2 = "Count";
  std::size_t w1 = h1.size(), w2 = h2.size();
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& [tag, n] : counts) {
    std::string name = tag;
    if (!name.empty()) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    rows.emplace_back(name, std::to_string(n));
    w1 = std::max(w1, rows.back().first.size());
    w2 = std::max(w2, rows.back().second.size());
  }
  std::ostringstream os;
  os << "| " << std::left << std::setw(static_cast<int>(w1)) << h1 << " | "
     << std::setw(static_cast<int>(w2)) << h2 << " |\n";
  os << "|" << std::string(w1 + 2, '-') << "|" << std::string(w2 + 2, '-') << "|\n";
  for (const auto& [name, n] : rows) {
    os << "| " << std::left << std::setw(static_cast<int>(w1)) << name << " | " << std::right
       << std::setw(static_cast<int>(w2)) << n << " |\n";
  }
  return os.str();
}

bool LabelVector::any() const {
  return std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; });
}

std::vector<LabelVector> GroundTruth::admitted() const {
  std::vector<LabelVector> out;
  for (const auto& l : labels) {
    if (l.any()) out.push_back(l);
  }
  return out;
}

GroundTruth derive_ground_truth(std::span<const AnnotationResponse> responses,
                                const TagVocabulary& vocab, double threshold,
                                const GroundTruthOptions& options) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw InvalidArgument("derive_ground_truth: threshold must lie in (0, 1]");

  struct Tally {
    std::set<std::string> participants;
    std::vector<std::size_t> votes;
  };
  std::map<std::string, Tally> by_image;
  for (const auto& id : options.image_ids) by_image[id].votes.assign(vocab.size(), 0);
  for (const auto& r : responses) {
    auto& tally = by_image[r.image_id];
    if (tally.votes.empty()) tally.votes.assign(vocab.size(), 0);
    if (!tally.participants.insert(r.participant_id).second) continue;
    for (const auto& t : r.selected_tags) {
      if (const auto i = vocab.index_of(t)) ++tally.votes[*i];
    }
  }

  GroundTruth gt;
  for (const auto& [image_id, tally] : by_image) {
    const std::size_t n = tally.participants.size();
    if (n < options.min_responses) {
      gt.shortfall.push_back({image_id, n});
      continue;
    }
    LabelVector lv{image_id, std::vector<std::uint8_t>(vocab.size(), 0)};
    const double need = threshold * static_cast<double>(n) - 1e-9;
    for (std::size_t t = 0; t < vocab.size(); ++t)
      lv.bits[t] = static_cast<double>(tally.votes[t]) >= need ? 1 : 0;
    if (!lv.any()) gt.all_zero.push_back(image_id);
    gt.labels.push_back(std::move(lv));
  }
  return gt;
}

}  // namespace vsent
