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
#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <thread>

#include <httplib.h>

#include "test_support.hpp"
#include "vsent/corpus.hpp"
#include "vsent/digest.hpp"
#include "vsent/error.hpp"
#include "vsent/text.hpp"

using namespace vsent;
using vsent::testing::TempDir;

namespace {

std::vector<EventCatalogEntry> catalog_fixture() {
  return parse_event_catalog(
      "disaster_type,location,year\n"
      "flood,Pakistan,2010\n"
      "flood,Bangladesh,2017\n"
      "cyclone,Fiji,2016\n"
      "earthquake,Nepal,2015\n"
      "cyclone,Mozambique,2019\n"
      "flood,\"Kerala, India\",2018\n"
      "cyclone,Myanmar,2008\n");
}

// Writes n fixture images for a query; returns their byte contents.
std::vector<std::string> write_fixture(const std::filesystem::path& root, const std::string& query,
                                       const std::vector<std::string>& payloads) {
  const auto dir = root / FixtureDirectoryAdapter::slug(query);
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    const auto file = dir / ("f" + std::to_string(i) + ".png");
    text::write_file(file, payloads[i]);
    text::write_file(file.string() + ".tags", "Flood! PAIN rescue");
  }
  return payloads;
}

}  // namespace

TEST_CASE("catalog parsing normalizes matching fields and keeps display casing") {
  const auto cat = catalog_fixture();
  REQUIRE(cat.size() == 7);
  CHECK(cat[0].disaster_type == "flood");
  CHECK(cat[0].location == "pakistan");
  CHECK(cat[0].location_display == "Pakistan");
  CHECK(cat[0].year == 2010);
  CHECK(cat[5].location_display == "Kerala, India");

  CHECK_THROWS_AS(parse_event_catalog("type,place\nflood,x\n"), DataError);
  CHECK_THROWS_AS(parse_event_catalog("disaster_type,location,year\nflood,,2010\n"), DataError);
  CHECK_THROWS_AS(parse_event_catalog("disaster_type,location,year\nflood,x,20a0\n"), DataError);
  CHECK_THROWS_AS(EventCatalogEntry::make("  ", "x", 1), InvalidArgument);
}

TEST_CASE("expand_keywords") {
  SUBCASE("plural keyword matches singular event type") {
    const auto out = expand_keywords({"floods"}, {EventCatalogEntry::make("flood", "Pakistan", 2010)});
    CHECK(out == std::vector<std::string>{"floods", "floods in Pakistan"});
  }
  SUBCASE("empty catalog is the identity") {
    CHECK(expand_keywords({"earthquakes"}, {}) == std::vector<std::string>{"earthquakes"});
  }
  SUBCASE("cross product count over the fixture") {
    const auto cat = catalog_fixture();
    const std::vector<std::string> base{"floods", "cyclones"};
    // Brute force: base keywords plus one query per (keyword, matching entry).
    std::size_t expected = base.size();
    for (const auto& k : base)
      for (const auto& e : cat) expected += text::singular(k) == e.disaster_type ? 1 : 0;
    const auto out = expand_keywords(base, cat);
    CHECK(expected == 8);
    CHECK(out.size() == expected);
    CHECK(out[0] == "floods");
    CHECK(out[1] == "cyclones");
    CHECK(out[2] == "floods in Pakistan");
    CHECK(out[7] == "cyclones in Myanmar");
  }
  SUBCASE("duplicates removed, base first") {
    const auto out = expand_keywords({"floods", "floods"}, {EventCatalogEntry::make("flood", "Chad", 2020),
                                                            EventCatalogEntry::make("flood", "Chad", 2022)});
    CHECK(out == std::vector<std::string>{"floods", "floods in Chad"});
  }
  CHECK_THROWS_AS(expand_keywords({}, catalog_fixture()), InvalidArgument);
}

TEST_CASE("expand_keywords output is a duplicate-free superset of the base keywords") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> words{"floods", "flood", "cyclones", "earthquakes", "wildfires", "storm"};
  const std::vector<std::string> places{"Chad", "Fiji", "Peru", "Nepal"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> base;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 4); i < n; ++i) base.push_back(words[rng() % words.size()]);
    std::vector<EventCatalogEntry> cat;
    for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i)
      cat.push_back(EventCatalogEntry::make(text::singular(words[rng() % words.size()]), places[rng() % places.size()], 2000));
    const auto out = expand_keywords(base, cat);
    CHECK(std::set<std::string>(out.begin(), out.end()).size() == out.size());
    for (const auto& b : base) CHECK(std::find(out.begin(), out.end(), b) != out.end());
  }
}

TEST_CASE("disaster type of a query") {
  CHECK(disaster_type_of_query("Floods in Pakistan") == "flood");
  CHECK(disaster_type_of_query("earthquakes") == "earthquake");
  CHECK(disaster_type_of_query("") == "");
}

TEST_CASE("fixture adapter ingest") {
  TempDir tmp;
  const auto root = tmp / "fixtures";
  write_fixture(root, "floods", {"a", "b", "c", "d", "e"});
  FixtureDirectoryAdapter adapter(root);

  SUBCASE("one record per fixture image, all tagged with the query") {
    const auto records = ingest(adapter, {"floods"}, tmp / "images");
    REQUIRE(records.size() == 5);
    std::set<std::string> ids;
    for (const auto& r : records) {
      CHECK(r.query == "floods");
      CHECK(r.disaster_type == "flood");
      CHECK(r.content_hash.size() == 64);
      CHECK(std::filesystem::exists(r.path));
      CHECK(sha256_file(r.path) == r.content_hash);
      CHECK(r.metadata_tokens == std::vector<std::string>{"flood!", "pain", "rescue"});
      ids.insert(r.id);
    }
    CHECK(ids.size() == 5);
  }
  SUBCASE("empty query list") { CHECK(ingest(adapter, {}, tmp / "images").empty()); }
  SUBCASE("unknown query yields nothing") { CHECK(ingest(adapter, {"volcanoes"}, tmp / "images").empty()); }
}

TEST_CASE("same bytes twice give equal content hashes") {
  TempDir tmp;
  write_fixture(tmp / "fx", "floods", {"same-bytes", "same-bytes"});
  FixtureDirectoryAdapter adapter(tmp / "fx");
  const auto records = ingest(adapter, {"floods"}, tmp / "out");
  REQUIRE(records.size() == 2);
  CHECK(records[0].content_hash == records[1].content_hash);
  CHECK(records[0].id != records[1].id);
  CHECK(records[0].content_hash == sha256_hex(std::string_view("same-bytes")));
}

namespace {

class FlakyAdapter final : public SourceAdapter {
 public:
  std::string name() const override { return "flaky"; }
  std::vector<FetchedImage> fetch(std::string_view query) override {
    if (query.find("bad") != std::string_view::npos) throw Error("source down");
    return {{std::string(query) + "-bytes", {"Hope"}}};
  }
};

class RandomAdapter final : public SourceAdapter {
 public:
  explicit RandomAdapter(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random"; }
  std::vector<FetchedImage> fetch(std::string_view query) override {
    std::mt19937_64 rng(seed_ + std::hash<std::string_view>{}(query));
    std::vector<FetchedImage> out;
    for (int i = 0, n = static_cast<int>(rng() % 8); i < n; ++i)
      out.push_back({"payload-" + std::to_string(rng() % 5), {}});
    return out;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace

TEST_CASE("ingest continues past a failing query and fails only when all fail") {
  TempDir tmp;
  FlakyAdapter adapter;
  const auto records = ingest(adapter, {"bad one", "floods", "bad two", "cyclones"}, tmp.path());
  REQUIRE(records.size() == 2);
  CHECK(records[0].query == "floods");
  CHECK(records[1].query == "cyclones");
  CHECK(records[0].metadata_tokens == std::vector<std::string>{"hope"});
  CHECK_THROWS_AS(ingest(adapter, {"bad", "also bad"}, tmp.path()), IngestError);
}

TEST_CASE("parallel ingest assembles records in query order") {
  TempDir tmp;
  FlakyAdapter adapter;
  const std::vector<std::string> queries{"a", "b", "c", "d", "e", "f", "g"};
  const auto records = ingest(adapter, queries, tmp.path(), {4, 1});
  REQUIRE(records.size() == queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) CHECK(records[i].query == queries[i]);
}

TEST_CASE("dedup") {
  auto rec = [](std::string id, std::string hash) {
    ImageRecord r;
    r.id = std::move(id);
    r.content_hash = std::move(hash);
    return r;
  };
  CHECK(dedup({}).empty());
  const auto out = dedup({rec("A", "h1"), rec("B", "h2"), rec("A'", "h1")});
  REQUIRE(out.size() == 2);
  CHECK(out[0].id == "A");
  CHECK(out[1].id == "B");

  // 10 records, hashes chosen so that 3 are repeats of earlier ones.
  const std::vector<std::string> hashes{"h0", "h1", "h2", "h1", "h3", "h4", "h0", "h5", "h6", "h4"};
  std::vector<ImageRecord> ten;
  for (std::size_t i = 0; i < hashes.size(); ++i) ten.push_back(rec("r" + std::to_string(i), hashes[i]));
  std::set<std::string> distinct(hashes.begin(), hashes.end());
  CHECK(distinct.size() == 7);
  CHECK(dedup(ten).size() == distinct.size());
}

TEST_CASE("ingest then dedup leaves distinct hashes; dedup is idempotent") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    TempDir tmp;
    RandomAdapter adapter(seed);
    const auto records = ingest(adapter, {"q1", "q2", "q3"}, tmp.path());
    const auto once = dedup(records);
    std::set<std::string> hashes;
    for (const auto& r : once) CHECK(hashes.insert(r.content_hash).second);
    CHECK(dedup(once) == once);
  }
}

TEST_CASE("manifest round trip and exclusions") {
  TempDir tmp;
  auto pool = vsent::testing::make_pool(4);
  pool[1].metadata_tokens = {"pain", "water"};
  write_manifest(tmp / "m.jsonl", pool);
  CHECK(read_manifest(tmp / "m.jsonl") == pool);

  const auto kept = apply_exclusions(pool, {"img-1", "img-3", "unknown"});
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == "img-0");
  CHECK(kept[1].id == "img-2");

  pool.push_back(pool[0]);
  CHECK_THROWS_AS(write_manifest(tmp / "dup.jsonl", pool), InvalidArgument);
  text::write_file(tmp / "bad.jsonl", "{\"id\": \"x\"}\n");
  CHECK_THROWS_AS(read_manifest(tmp / "bad.jsonl"), DataError);
}

TEST_CASE("http adapter against a local search endpoint") {
  httplib::Server server;
  server.Get("/api/search", [](const httplib::Request& req, httplib::Response& res) {
    const auto q = req.get_param_value("q");
    if (q == "floods in Pakistan") {
      res.set_content(R"([{"url": "/img/1", "tokens": ["Flood", "pain"]}, {"url": "img/2"}])",
                      "application/json");
    } else if (q == "broken") {
      res.status = 500;
    } else {
      res.set_content("[]", "application/json");
    }
  });
  server.Get(R"(/api/img/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
    res.set_content("bytes-" + req.matches[1].str(), "application/octet-stream");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpSourceAdapter adapter("http://127.0.0.1:" + std::to_string(port) + "/api/");
  const auto hits = adapter.fetch("floods in Pakistan");
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].bytes == "bytes-1");
  CHECK(hits[0].metadata_tokens == std::vector<std::string>{"Flood", "pain"});
  CHECK(hits[1].bytes == "bytes-2");
  CHECK(adapter.fetch("nothing").empty());
  CHECK_THROWS(adapter.fetch("broken"));

  TempDir tmp;
  const auto records = ingest(adapter, {"broken", "floods in Pakistan"}, tmp.path());
  CHECK(records.size() == 2);
  CHECK(records[0].disaster_type == "flood");

  server.stop();
  t.join();
}

TEST_CASE("adapter factory") {
  TempDir tmp;
  CHECK(make_source_adapter("fixture:" + tmp.path().string())->name() == "fixture");
  CHECK(make_source_adapter("http:http://localhost:1")->name() == "http");
  CHECK_THROWS_AS(make_source_adapter("ftp:x"), InvalidArgument);
  CHECK_THROWS_AS(make_source_adapter("nocolon"), InvalidArgument);
  CHECK_THROWS_AS(make_source_adapter("fixture:/definitely/not/here"), InvalidArgument);
  CHECK(FixtureDirectoryAdapter::slug("Floods in Pakistan!") == "floods_in_pakistan");
}
