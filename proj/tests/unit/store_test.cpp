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

#include <cmath>
#include <map>
#include <thread>

#include <json.hpp>

#include "test_support.hpp"
#include "vsent/annotation_store.hpp"
#include "vsent/error.hpp"
#include "vsent/text.hpp"

using namespace vsent;
using vsent::testing::make_pool;
using vsent::testing::response;
using vsent::testing::TempDir;

namespace {

const TagVocabulary& vocab() {
  static const TagVocabulary v = TagVocabulary::disaster_default();
  return v;
}

}  // namespace

TEST_CASE("next_task prefers the least annotated image") {
  AnnotationStore store(make_pool(2), vocab(), {}, 1);
  for (int i = 0; i < 4; ++i) store.submit(response("a" + std::to_string(i), "img-0", {"pain"}));
  for (int i = 0; i < 5; ++i) store.submit(response("b" + std::to_string(i), "img-1", {"pain"}));
  for (int trial = 0; trial < 20; ++trial) {
    const auto task = store.next_task("fresh-" + std::to_string(trial));
    REQUIRE(task);
    CHECK(task->image_id == "img-0");
    CHECK(task->vocabulary == vocab());
  }
}

TEST_CASE("next_task signals exhaustion") {
  AnnotationStore store(make_pool(3), vocab(), {}, 1);
  for (int i = 0; i < 3; ++i) {
    const auto task = store.next_task("p");
    REQUIRE(task);
    store.submit(response("p", task->image_id, {"hope"}));
  }
  CHECK_FALSE(store.next_task("p").has_value());
  CHECK(store.next_task("q").has_value());
}

TEST_CASE("excluded images are never served") {
  AnnotationStore store(make_pool(4), vocab(), {"img-1", "img-2"}, 3);
  CHECK(store.pool().size() == 2);
  for (int i = 0; i < 50; ++i) {
    const auto task = store.next_task("p" + std::to_string(i));
    REQUIRE(task);
    CHECK((task->image_id == "img-0" || task->image_id == "img-3"));
  }
  CHECK_THROWS_AS(store.submit(response("p", "img-1", {"pain"})), ValidationError);
}

TEST_CASE("fresh pool draws are uniform") {
  // 3 images, 6000 fresh participants: chi-square with 2 dof.
  AnnotationStore store(make_pool(3), vocab(), {}, 12345);
  std::map<std::string, double> hits;
  const int n = 6000;
  for (int i = 0; i < n; ++i) hits[store.next_task("p" + std::to_string(i))->image_id] += 1;
  REQUIRE(hits.size() == 3);
  double chi2 = 0;
  for (const auto& [id, h] : hits) chi2 += std::pow(h - n / 3.0, 2) / (n / 3.0);
  CHECK(chi2 < 13.8);  // p = 0.001
}

TEST_CASE("submit") {
  AnnotationStore store(make_pool(2), vocab(), {}, 1);
  SUBCASE("valid response is stored") {
    const auto ack = store.submit(response("p", "img-0", {"pain"}));
    CHECK(ack.sequence == 1);
    CHECK(store.responses().size() == 1);
    CHECK(store.response_count("img-0") == 1);
  }
  SUBCASE("duplicate pair conflicts and changes nothing") {
    store.submit(response("p", "img-0", {"pain"}));
    CHECK_THROWS_AS(store.submit(response("p", "img-0", {"hope"})), ConflictError);
    CHECK(store.responses().size() == 1);
  }
  SUBCASE("validation errors") {
    CHECK_THROWS_AS(store.submit(response("p", "img-0", {"fear"})), ValidationError);
    CHECK_THROWS_AS(store.submit(response("p", "img-0", {})), ValidationError);
    CHECK_THROWS_AS(store.submit(response("p", "nope", {"pain"})), ValidationError);
    CHECK(store.responses().empty());
  }
  SUBCASE("missing timestamp is assigned") {
    auto r = response("p", "img-0", {"pain"});
    r.timestamp = Timestamp{};
    const auto before = now_utc();
    store.submit(r);
    CHECK(store.responses()[0].timestamp >= before);
  }
}

TEST_CASE("concurrent duplicate submissions store exactly one") {
  AnnotationStore store(make_pool(1), vocab(), {}, 1);
  std::atomic<int> stored{0}, conflicts{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      try {
        store.submit(response("same", "img-0", {"pain"}));
        ++stored;
      } catch (const ConflictError&) {
        ++conflicts;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(stored == 1);
  CHECK(conflicts == 7);
}

TEST_CASE("persistent store replays its log") {
  TempDir tmp;
  const auto dir = tmp / "store";
  AnnotationStore::initialize(dir, make_pool(5), vocab(), {"img-4"});
  StudyStats before;
  {
    auto store = AnnotationStore::open(dir, 1);
    CHECK(store->pool().size() == 4);
    std::mt19937_64 rng(8);
    for (const auto& r : vsent::testing::random_responses(rng, vocab(), 30, 4)) {
      if (r.selected_tags.empty()) continue;
      store->submit(r);
    }
    before = store->stats();
    store->write_snapshot();
  }
  CHECK(std::filesystem::exists(dir / "stats.json"));
  auto reopened = AnnotationStore::open(dir, 2);
  const auto after = reopened->stats();
  CHECK(after.responses == before.responses);
  CHECK(after.tag_counts == before.tag_counts);
  CHECK(after.cooccurrence == before.cooccurrence);
  CHECK(nlohmann::json::parse(text::read_file(dir / "stats.json")) == nlohmann::json::parse(stats_to_json(after)));

  // Initialization refuses to clobber collected responses.
  CHECK_THROWS(AnnotationStore::initialize(dir, make_pool(5), vocab()));
  CHECK_THROWS_AS(AnnotationStore::open(tmp / "missing"), ConfigError);
}

TEST_CASE("stats track per-image response spread") {
  AnnotationStore store(make_pool(3), vocab(), {}, 1);
  store.submit(response("a", "img-0", {"pain", "shock"}));
  store.submit(response("b", "img-0", {"pain"}, {"water"}));
  store.submit(response("a", "img-1", {"hope"}));
  const auto s = store.stats();
  CHECK(s.responses == 3);
  CHECK(s.images == 3);
  CHECK(s.min_responses_per_image == 0);
  CHECK(s.max_responses_per_image == 2);
  CHECK(s.tag_counts[0] == 2);
  CHECK(s.cooccurrence[0][1] == 1);
  CHECK(s.extra_tags.at("water") == 1);
}

TEST_CASE("every served task is least annotated among the participant's eligible images") {
  // 20 participants take turns on a 50-image pool until all are exhausted.
  AnnotationStore store(make_pool(50), vocab(), {}, 77);
  std::set<std::pair<std::string, std::string>> done;
  std::size_t steps = 0;
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (int p = 0; p < 20; ++p) {
      const auto pid = "p" + std::to_string(p);
      const auto task = store.next_task(pid);
      if (!task) continue;
      std::size_t eligible_min = SIZE_MAX;
      for (const auto& img : store.pool())
        if (!done.contains({pid, img.id})) eligible_min = std::min(eligible_min, store.response_count(img.id));
      CHECK(store.response_count(task->image_id) == eligible_min);
      CHECK_FALSE(done.contains({pid, task->image_id}));
      store.submit(response(pid, task->image_id, {"hope"}));
      done.insert({pid, task->image_id});
      progressed = true;
      ++steps;
    }
  }
  CHECK(steps == 1000);
  for (const auto& img : store.pool()) CHECK(store.response_count(img.id) == 20);
}
