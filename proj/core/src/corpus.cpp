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
#include "vsent/corpus.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "vsent/digest.hpp"
#include "vsent/error.hpp"
#include "vsent/log.hpp"
#include "vsent/text.hpp"

namespace vsent {

namespace fs = std::filesystem;
using nlohmann::json;

EventCatalogEntry EventCatalogEntry::make(std::string_view disaster_type,
                                          std::string_view location, int year) {
  EventCatalogEntry e;
  e.disaster_type = text::to_lower(text::trim(disaster_type));
  e.location_display = text::trim(location);
  e.location = text::to_lower(e.location_display);
  e.year = year;
  if (e.disaster_type.empty()) throw InvalidArgument("catalog entry: empty disaster_type");
  if (e.location.empty()) throw InvalidArgument("catalog entry: empty location");
  return e;
}

namespace {

// RFC 4180-ish: quoted fields, "" escapes a quote inside quotes.
std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string sniff_extension(std::string_view bytes) {
  auto starts = [&](std::string_view magic) { return bytes.substr(0, magic.size()) == magic; };
  if (starts("\x89PNG")) return "png";
  if (starts("\xFF\xD8\xFF")) return "jpg";
  if (starts("GIF8")) return "gif";
  if (starts("BM")) return "bmp";
  if (starts("P6") || starts("P3")) return "ppm";
  if (starts("P5") || starts("P2")) return "pgm";
  if (bytes.size() >= 12 && starts("RIFF") && bytes.substr(8, 4) == "WEBP") return "webp";
  return "bin";
}

std::string make_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img-%06zu", n);
  return buf;
}

}  // namespace

std::vector<EventCatalogEntry> parse_event_catalog(std::string_view csv) {
  std::vector<EventCatalogEntry> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::size_t col_type = 0, col_loc = 1, col_year = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto fields = parse_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      std::optional<std::size_t> t, l, y;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = text::to_lower(text::trim(fields[i]));
        if (name == "disaster_type") t = i;
        if (name == "location") l = i;
        if (name == "year") y = i;
      }
      if (!t || !l || !y)
        throw DataError("catalog line 1", "expected header disaster_type,location,year");
      col_type = *t;
      col_loc = *l;
      col_year = *y;
      continue;
    }
    const auto where = "catalog line " + std::to_string(lineno);
    const std::size_t need = std::max({col_type, col_loc, col_year}) + 1;
    if (fields.size() < need) throw DataError(where, "too few fields");
    const auto year_text = text::trim(fields[col_year]);
    int year = 0;
    const auto* first = year_text.data();
    const auto* last = first + year_text.size();
    const auto [ptr, ec] = std::from_chars(first, last, year);
    if (ec != std::errc{} || ptr != last) throw DataError(where, "year is not an integer");
    try {
      out.push_back(EventCatalogEntry::make(fields[col_type], fields[col_loc], year));
    } catch (const InvalidArgument& e) {
      throw DataError(where, e.what());
    }
  }
  if (!header_seen) throw DataError("catalog", "empty catalog file");
  return out;
}

std::vector<EventCatalogEntry> read_event_catalog(const fs::path& path) {
  return parse_event_catalog(text::read_file(path));
}

std::vector<std::string> expand_keywords(const std::vector<std::string>& base_keywords,
                                         const std::vector<EventCatalogEntry>& catalog) {
  if (base_keywords.empty()) throw InvalidArgument("expand_keywords: no base keywords");
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto push = [&](std::string s) {
    if (seen.insert(s).second) out.push_back(std::move(s));
  };
  for (const auto& k : base_keywords) push(k);
  for (const auto& k : base_keywords) {
    const auto key = text::singular(text::to_lower(text::trim(k)));
    for (const auto& e : catalog) {
      if (text::singular(e.disaster_type) == key) push(k + " in " + e.location_display);
    }
  }
  return out;
}

std::string disaster_type_of_query(std::string_view query) {
  const auto words = text::split_whitespace(query);
  if (words.empty()) return {};
  return text::singular(text::to_lower(words.front()));
}

std::vector<ImageRecord> ingest(SourceAdapter& adapter, const std::vector<std::string>& queries,
                                const fs::path& dest_dir, const IngestOptions& options) {
  if (queries.empty()) return {};
  fs::create_directories(dest_dir);

  std::vector<std::optional<std::vector<FetchedImage>>> fetched(queries.size());
  auto fetch_one = [&adapter](const std::string& q) -> std::optional<std::vector<FetchedImage>> {
    try {
      return adapter.fetch(q);
    } catch (const std::exception& e) {
      log::warning(adapter.name() + ": query '" + q + "' failed: " + e.what());
      return std::nullopt;
    }
  };

  const std::size_t width = std::max<std::size_t>(1, options.max_parallel);
  for (std::size_t start = 0; start < queries.size(); start += width) {
    const std::size_t stop = std::min(queries.size(), start + width);
    if (width == 1) {
      fetched[start] = fetch_one(queries[start]);
      continue;
    }
    std::vector<std::future<std::optional<std::vector<FetchedImage>>>> jobs;
    for (std::size_t i = start; i < stop; ++i)
      jobs.push_back(std::async(std::launch::async, fetch_one, std::cref(queries[i])));
    for (std::size_t i = start; i < stop; ++i) fetched[i] = jobs[i - start].get();
  }

  std::size_t failures = 0;
  for (const auto& f : fetched) failures += f.has_value() ? 0 : 1;
  if (failures == queries.size())
    throw IngestError("ingest: all " + std::to_string(failures) + " queries failed");

  std::vector<ImageRecord> records;
  std::size_t next = options.first_id;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    if (!fetched[qi]) continue;
    for (auto& img : *fetched[qi]) {
      ImageRecord r;
      r.id = make_id(next++);
      const auto file = dest_dir / (r.id + "." + sniff_extension(img.bytes));
      text::write_file(file, img.bytes);
      r.path = fs::absolute(file).lexically_normal().string();
      r.query = queries[qi];
      r.disaster_type = disaster_type_of_query(queries[qi]);
      for (const auto& t : img.metadata_tokens) {
        auto norm = text::to_lower(text::trim(t));
        if (!norm.empty()) r.metadata_tokens.push_back(std::move(norm));
      }
      r.content_hash = sha256_hex(img.bytes);
      records.push_back(std::move(r));
    }
  }
  return records;
}

std::vector<ImageRecord> dedup(const std::vector<ImageRecord>& records) {
  std::vector<ImageRecord> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.content_hash).second) out.push_back(r);
  }
  return out;
}

std::vector<ImageRecord> apply_exclusions(const std::vector<ImageRecord>& records,
                                          const std::vector<std::string>& excluded_ids) {
  const std::unordered_set<std::string> excluded(excluded_ids.begin(), excluded_ids.end());
  std::vector<ImageRecord> out;
  for (const auto& r : records) {
    if (!excluded.contains(r.id)) out.push_back(r);
  }
  return out;
}

std::string record_to_json_line(const ImageRecord& r) {
  json j = {{"id", r.id},
            {"path", r.path},
            {"query", r.query},
            {"disaster_type", r.disaster_type},
            {"metadata_tokens", r.metadata_tokens},
            {"content_hash", r.content_hash}};
  return j.dump();
}

ImageRecord record_from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    ImageRecord r;
    r.id = j.at("id").get<std::string>();
    r.path = j.at("path").get<std::string>();
    r.query = j.value("query", "");
    r.disaster_type = j.value("disaster_type", "");
    r.metadata_tokens = j.value("metadata_tokens", std::vector<std::string>{});
    r.content_hash = j.value("content_hash", "");
    if (r.id.empty()) throw DataError("manifest", "empty id");
    return r;
  } catch (const json::exception& e) {
    throw DataError("manifest", e.what());
  }
}

void write_manifest(const fs::path& path, const std::vector<ImageRecord>& records) {
  std::set<std::string> ids;
  std::ostringstream os;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw InvalidArgument("manifest: duplicate id " + r.id);
    os << record_to_json_line(r) << '\n';
  }
  text::write_file(path, os.str());
}

std::vector<ImageRecord> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), "cannot open manifest");
  std::vector<ImageRecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(record_from_json_line(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno), e.what());
    }
    if (!ids.insert(out.back().id).second)
      throw DataError(path.string() + ":" + std::to_string(lineno), "duplicate id " + out.back().id);
  }
  return out;
}

}  // namespace vsent
