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

// Corpus ingestion: disaster keyword expansion against an event catalog,
// pluggable image sources, the JSONL image manifest and content-hash dedup.

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vsent {

/// One row of a disaster event catalog (an EM-DAT style export).
///
/// `disaster_type` and `location` are trimmed and lowercased and are the
/// fields used for matching. `location_display` keeps the catalog's original
/// casing and is what goes into generated search queries.
struct EventCatalogEntry {
  std::string disaster_type;
  std::string location;
  int year = 0;
  std::string location_display;

  /// Builds a normalized entry. Throws InvalidArgument when either text
  /// field is empty after trimming.
  static EventCatalogEntry make(std::string_view disaster_type,
                                std::string_view location, int year);
};

/// Parses a CSV catalog with the header `disaster_type,location,year`.
/// Double-quoted fields are honoured so locations may contain commas.
std::vector<EventCatalogEntry> read_event_catalog(const std::filesystem::path& path);
std::vector<EventCatalogEntry> parse_event_catalog(std::string_view csv);

/// Returns the base keywords followed by "<keyword> in <location>" for every
/// catalog entry whose disaster type matches the keyword, ignoring a
/// trailing plural 's' and case. Order: base keywords, then expansions grouped
/// by keyword in catalog order. Duplicates are dropped (first kept).
///
/// Throws InvalidArgument when `base_keywords` is empty.
std::vector<std::string> expand_keywords(const std::vector<std::string>& base_keywords,
                                         const std::vector<EventCatalogEntry>& catalog);

/// Disaster type implied by a query: the first word, lowercased and
/// singularized ("Floods in Pakistan" -> "flood").
std::string disaster_type_of_query(std::string_view query);

struct ImageRecord {
  std::string id;
  std::string path;
  std::string query;
  std::string disaster_type;
  std::vector<std::string> metadata_tokens;
  std::string content_hash;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// One image returned by a source for a query.
struct FetchedImage {
  std::string bytes;
  std::vector<std::string> metadata_tokens;
};

/// A place images come from. Implementations must not touch the manifest;
/// ingest() owns persistence. fetch() may be called from several threads
/// at once with different queries.
class SourceAdapter {
 public:
  virtual ~SourceAdapter() = default;

  virtual std::string name() const = 0;

  /// Throws on source failure. An empty result means "nothing found".
  virtual std::vector<FetchedImage> fetch(std::string_view query) = 0;
};

/// Offline adapter over a directory tree:
///
///     <root>/<query-slug>/<image file>
///     <root>/<query-slug>/<image file>.tags   (optional, whitespace separated)
///
/// The slug is the lowercased query with runs of non-alphanumerics replaced
/// by '_' ("Floods in Pakistan" -> "floods_in_pakistan"). A missing slug
/// directory yields no images. Files are returned in lexicographic order.
class FixtureDirectoryAdapter final : public SourceAdapter {
 public:
  explicit FixtureDirectoryAdapter(std::filesystem::path root);

  std::string name() const override { return "fixture"; }
  std::vector<FetchedImage> fetch(std::string_view query) override;

  static std::string slug(std::string_view query);

 private:
  std::filesystem::path root_;
};

/// Minimal HTTP source. Issues `GET <base>/search?q=<query>` expecting a JSON
/// array of `{"url": "...", "tokens": ["..."]}` and then fetches each url
/// (absolute, or a path relative to `base`). It does not authenticate against
/// any real platform; point it at a proxy or mock that speaks this shape.
class HttpSourceAdapter final : public SourceAdapter {
 public:
  explicit HttpSourceAdapter(std::string base_url);

  std::string name() const override { return "http"; }
  std::vector<FetchedImage> fetch(std::string_view query) override;

 private:
  std::string base_url_;
};

/// Creates an adapter from a CLI spec: "fixture:<dir>" or "http:<base-url>".
std::unique_ptr<SourceAdapter> make_source_adapter(std::string_view spec);

struct IngestOptions {
  /// Maximum queries fetched concurrently. Records are still assembled in
  /// query order.
  std::size_t max_parallel = 1;
  /// First numeric suffix used for generated ids ("img-000001").
  std::size_t first_id = 1;
};

/// Fetches every query, writes each image under `dest_dir` and returns one
/// record per image. A failing query is logged and skipped; if every query
/// fails an IngestError is thrown. An empty query list returns no records.
std::vector<ImageRecord> ingest(SourceAdapter& adapter,
                                const std::vector<std::string>& queries,
                                const std::filesystem::path& dest_dir,
                                const IngestOptions& options = {});

/// Keeps the first record for each content hash, preserving order.
std::vector<ImageRecord> dedup(const std::vector<ImageRecord>& records);

/// Drops records whose id appears in `excluded_ids`.
std::vector<ImageRecord> apply_exclusions(const std::vector<ImageRecord>& records,
                                          const std::vector<std::string>& excluded_ids);

// Manifest: UTF-8 JSON lines, one ImageRecord per line.
void write_manifest(const std::filesystem::path& path, const std::vector<ImageRecord>& records);
std::vector<ImageRecord> read_manifest(const std::filesystem::path& path);
std::string record_to_json_line(const ImageRecord& record);
ImageRecord record_from_json_line(std::string_view line);

}  // namespace vsent
