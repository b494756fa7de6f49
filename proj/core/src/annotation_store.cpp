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
#include "vsent/annotation_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "vsent/error.hpp"
#include "vsent/log.hpp"
#include "vsent/text.hpp"

namespace vsent {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.jsonl";
constexpr const char* kVocab = "vocab.txt";
constexpr const char* kExclusions = "exclusions.txt";
constexpr const char* kLog = "responses.jsonl";
constexpr const char* kStats = "stats.json";

void append_durably(const fs::path& path, const std::string& line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("response log: open failed: " + std::string(std::strerror(errno)));
  const std::string data = line + "\n";
  std::size_t written = 0;
  while (written < data.size()) {
    const auto n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string why = std::strerror(errno);
      ::close(fd);
      throw Error("response log: write failed: " + why);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd);
    throw Error("response log: fsync failed: " + why);
  }
  ::close(fd);
}

}  // namespace

std::string stats_to_json(const StudyStats& s) {
  json counts = json::object();
  for (std::size_t i = 0; i < s.vocabulary.size(); ++i) counts[s.vocabulary[i]] = s.tag_counts[i];
  json j = {{"vocabulary", s.vocabulary.tags()},
            {"responses", s.responses},
            {"images", s.images},
            {"tag_counts", counts},
            {"cooccurrence", s.cooccurrence},
            {"extra_tags", s.extra_tags},
            {"min_responses_per_image", s.min_responses_per_image},
            {"max_responses_per_image", s.max_responses_per_image}};
  return j.dump(2);
}

AnnotationStore::AnnotationStore(std::vector<ImageRecord> manifest, TagVocabulary vocab,
                                 const std::vector<std::string>& excluded_ids, std::uint64_t seed)
    : vocab_(std::move(vocab)), pool_(apply_exclusions(manifest, excluded_ids)), rng_(seed) {
  if (vocab_.empty()) throw InvalidArgument("annotation store: empty vocabulary");
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    if (!pool_index_.emplace(pool_[i].id, i).second)
      throw InvalidArgument("annotation store: duplicate image id " + pool_[i].id);
  }
  counts_.assign(pool_.size(), 0);
}

void AnnotationStore::initialize(const fs::path& dir, const std::vector<ImageRecord>& manifest,
                                 const TagVocabulary& vocab,
                                 const std::vector<std::string>& excluded_ids) {
  const auto log_path = dir / kLog;
  if (fs::exists(log_path) && fs::file_size(log_path) > 0)
    throw ConfigError("store " + dir.string() + " already holds responses; refusing to reinitialize");
  fs::create_directories(dir);
  write_manifest(dir / kManifest, manifest);
  write_vocabulary(dir / kVocab, vocab);
  text::write_list_file(dir / kExclusions, excluded_ids);
  text::write_file(log_path, "");
}

std::unique_ptr<AnnotationStore> AnnotationStore::open(const fs::path& dir, std::uint64_t seed) {
  if (!fs::exists(dir / kManifest) || !fs::exists(dir / kVocab))
    throw ConfigError("not an annotation store (missing manifest or vocabulary): " + dir.string());
  std::vector<std::string> excluded;
  if (fs::exists(dir / kExclusions)) excluded = text::read_list_file(dir / kExclusions);
  auto store = std::make_unique<AnnotationStore>(read_manifest(dir / kManifest),
                                                 read_vocabulary(dir / kVocab), excluded, seed);
  store->dir_ = dir;

  std::ifstream in(dir / kLog);
  std::string line;
  std::size_t lineno = 0;
  while (in && std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto where = (dir / kLog).string() + ":" + std::to_string(lineno);
    try {
      auto r = response_from_json_line(line);
      validate_response(r, store->vocab_);
      if (!store->pool_index_.contains(r.image_id))
        throw ValidationError("unknown image " + r.image_id);
      if (store->pairs_.contains({r.participant_id, r.image_id}))
        throw ConflictError("duplicate pair");
      store->append_locked(std::move(r), false);
    } catch (const Error& e) {
      log::warning(where + ": skipped log entry: " + e.what());
    }
  }
  return store;
}

std::optional<AnnotationTask> AnnotationStore::next_task(std::string_view participant_id) {
  const std::string participant(participant_id);
  std::lock_guard lock(mutex_);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    if (pairs_.contains({participant, pool_[i].id})) continue;
    if (counts_[i] < best) {
      best = counts_[i];
      candidates.clear();
    }
    if (counts_[i] == best) candidates.push_back(i);
  }
  if (candidates.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const auto& rec = pool_[candidates[pick(rng_)]];
  return AnnotationTask{rec.id, rec.path, vocab_};
}

void AnnotationStore::append_locked(AnnotationResponse response, bool persist) {
  if (persist && dir_) append_durably(*dir_ / kLog, response_to_json_line(response));
  ++counts_[pool_index_.find(response.image_id)->second];
  pairs_.emplace(response.participant_id, response.image_id);
  log_.push_back(std::move(response));
}

SubmitAck AnnotationStore::submit(AnnotationResponse response) {
  validate_response(response, vocab_);
  if (!pool_index_.contains(response.image_id))
    throw ValidationError("unknown image_id: " + response.image_id);
  if (response.timestamp.time_since_epoch().count() == 0) response.timestamp = now_utc();

  std::lock_guard lock(mutex_);
  if (pairs_.contains({response.participant_id, response.image_id}))
    throw ConflictError("participant " + response.participant_id + " already annotated " +
                        response.image_id);
  SubmitAck ack{log_.size() + 1, response.participant_id, response.image_id};
  append_locked(std::move(response), true);
  return ack;
}

std::vector<AnnotationResponse> AnnotationStore::responses() const {
  std::lock_guard lock(mutex_);
  return log_;
}

StudyStats AnnotationStore::stats() const {
  std::vector<AnnotationResponse> snapshot;
  std::vector<std::size_t> counts;
  {
    std::lock_guard lock(mutex_);
    snapshot = log_;
    counts = counts_;
  }
  StudyStats s;
  s.vocabulary = vocab_;
  s.responses = snapshot.size();
  s.images = pool_.size();
  s.tag_counts = tag_counts(snapshot, vocab_);
  s.cooccurrence = cooccurrence(snapshot, vocab_).rows();
  s.extra_tags = extra_tag_counts(snapshot);
  if (!counts.empty()) {
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    s.min_responses_per_image = *lo;
    s.max_responses_per_image = *hi;
  }
  return s;
}

std::size_t AnnotationStore::response_count(std::string_view image_id) const {
  const auto it = pool_index_.find(image_id);
  if (it == pool_index_.end()) return 0;
  std::lock_guard lock(mutex_);
  return counts_[it->second];
}

const ImageRecord* AnnotationStore::find_image(std::string_view image_id) const {
  const auto it = pool_index_.find(image_id);
  return it == pool_index_.end() ? nullptr : &pool_[it->second];
}

void AnnotationStore::write_snapshot() const {
  if (!dir_) return;
  text::write_file(*dir_ / kStats, stats_to_json(stats()) + "\n");
}

}  // namespace vsent
