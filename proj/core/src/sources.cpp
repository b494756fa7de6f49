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
#include <algorithm>
#include <cctype>

#include <httplib.h>
#include <json.hpp>

#include "vsent/corpus.hpp"
#include "vsent/error.hpp"
#include "vsent/text.hpp"

namespace vsent {

namespace fs = std::filesystem;

FixtureDirectoryAdapter::FixtureDirectoryAdapter(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_))
    throw InvalidArgument("fixture adapter: not a directory: " + root_.string());
}

std::string FixtureDirectoryAdapter::slug(std::string_view query) {
  std::string out;
  bool gap = false;
  for (char c : text::to_lower(query)) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (gap && !out.empty()) out.push_back('_');
      out.push_back(c);
      gap = false;
    } else {
      gap = true;
    }
  }
  return out;
}

std::vector<FetchedImage> FixtureDirectoryAdapter::fetch(std::string_view query) {
  const auto dir = root_ / slug(query);
  if (!fs::is_directory(dir)) return {};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() == ".tags") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<FetchedImage> out;
  for (const auto& f : files) {
    FetchedImage img;
    img.bytes = text::read_file(f);
    const auto sidecar = fs::path(f.string() + ".tags");
    if (fs::exists(sidecar)) img.metadata_tokens = text::split_whitespace(text::read_file(sidecar));
    out.push_back(std::move(img));
  }
  return out;
}

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // leading '/' or empty
};

Url split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw InvalidArgument("not an absolute url: " + std::string(url));
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http") throw InvalidArgument("only http urls are supported: " + std::string(url));
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), ""};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

std::string get_body(httplib::Client& cli, const std::string& path) {
  auto res = cli.Get(path);
  if (!res) throw Error("GET " + path + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("GET " + path + ": HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace

HttpSourceAdapter::HttpSourceAdapter(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  split_url(base_url_);
}

std::vector<FetchedImage> HttpSourceAdapter::fetch(std::string_view query) {
  const auto base = split_url(base_url_);
  httplib::Client cli(base.origin);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(30);

  auto res = cli.Get(base.path + "/search", httplib::Params{{"q", std::string(query)}},
                     httplib::Headers{});
  if (!res) throw Error("search: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error("search: HTTP " + std::to_string(res->status));

  nlohmann::json hits;
  try {
    hits = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("search: malformed response: ") + e.what());
  }
  if (!hits.is_array()) throw Error("search: expected a JSON array");

  std::vector<FetchedImage> out;
  for (const auto& hit : hits) {
    const auto url = hit.at("url").get<std::string>();
    FetchedImage img;
    if (url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0) {
      const auto u = split_url(url);
      httplib::Client other(u.origin);
      img.bytes = get_body(other, u.path.empty() ? "/" : u.path);
    } else {
      img.bytes = get_body(cli, url.front() == '/' ? base.path + url : base.path + "/" + url);
    }
    if (hit.contains("tokens")) img.metadata_tokens = hit["tokens"].get<std::vector<std::string>>();
    out.push_back(std::move(img));
  }
  return out;
}

std::unique_ptr<SourceAdapter> make_source_adapter(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw InvalidArgument("adapter spec must be fixture:<dir> or http:<url>");
  const auto kind = spec.substr(0, colon);
  const auto arg = std::string(spec.substr(colon + 1));
  if (kind == "fixture") return std::make_unique<FixtureDirectoryAdapter>(arg);
  if (kind == "http") return std::make_unique<HttpSourceAdapter>(arg);
  throw InvalidArgument("unknown adapter '" + std::string(kind) + "'");
}

}  // namespace vsent
