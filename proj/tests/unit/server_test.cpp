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

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "test_support.hpp"
#include "vsent/annotation_server.hpp"
#include "vsent/annotation_store.hpp"
#include "vsent/text.hpp"

using namespace vsent;
using json = nlohmann::json;

namespace {

// Runs an AnnotationServer on an ephemeral port for the lifetime of the object.
class RunningServer {
 public:
  RunningServer(AnnotationStore& store, std::optional<std::filesystem::path> ui = std::nullopt)
      : server_(store, std::move(ui)) {
    port_ = server_.bind("127.0.0.1", 0);
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.serve(); });
    server_.wait_until_ready();
  }
  ~RunningServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  AnnotationServer server_;
  int port_ = -1;
  std::thread thread_;
};

std::string body(const std::string& participant, const std::string& image, json tags, json extra = json::array()) {
  return json{{"participant_id", participant}, {"image_id", image}, {"selected_tags", tags}, {"extra_tags", extra}}
      .dump();
}

}  // namespace

TEST_CASE("annotation HTTP API") {
  vsent::testing::TempDir tmp;
  auto pool = vsent::testing::make_pool(2);
  text::write_file(tmp / "a.png", "\x89PNG fake");
  pool[0].path = (tmp / "a.png").string();
  AnnotationStore store(pool, TagVocabulary::disaster_default(), {}, 5);
  text::write_file(tmp / "index.html", "<html>ui</html>");
  RunningServer server(store, tmp.path());
  auto cli = server.client();

  SUBCASE("task, submit, conflict, exhaustion") {
    auto res = cli.Get("/api/task?participant=alice");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto task = json::parse(res->body);
    const auto image = task.at("image_id").get<std::string>();
    CHECK(task.at("image_uri") == "/api/image/" + image);
    CHECK(task.at("vocabulary").size() == 7);

    res = cli.Post("/api/response", body("alice", image, {"pain", "rescue"}, {"boats"}), "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    CHECK(json::parse(res->body).at("sequence") == 1);

    res = cli.Post("/api/response", body("alice", image, {"hope"}), "application/json");
    REQUIRE(res);
    CHECK(res->status == 409);

    res = cli.Get("/api/task?participant=alice");
    REQUIRE(res);
    CHECK(json::parse(res->body).at("image_id") != image);
    const auto other = json::parse(res->body).at("image_id").get<std::string>();
    REQUIRE(cli.Post("/api/response", body("alice", other, {"hope"}), "application/json")->status == 201);
    res = cli.Get("/api/task?participant=alice");
    REQUIRE(res);
    CHECK(res->status == 204);

    res = cli.Get("/api/stats");
    REQUIRE(res);
    const auto stats = json::parse(res->body);
    CHECK(stats.at("responses") == 2);
    CHECK(stats.at("tag_counts").at("pain") == 1);
    CHECK(stats.at("tag_counts").at("hope") == 1);
    CHECK(stats.at("extra_tags").at("boats") == 1);
  }

  SUBCASE("validation and malformed bodies") {
    CHECK(cli.Post("/api/response", body("bob", "img-0", {"fear"}), "application/json")->status == 422);
    CHECK(cli.Post("/api/response", body("bob", "img-0", json::array()), "application/json")->status == 422);
    CHECK(cli.Post("/api/response", body("bob", "img-9", {"pain"}), "application/json")->status == 422);
    CHECK(cli.Post("/api/response", R"({"participant_id": 3})", "application/json")->status == 422);
    CHECK(cli.Post("/api/response", "{oops", "application/json")->status == 400);
    CHECK(cli.Get("/api/task")->status == 400);
    CHECK(store.responses().empty());
  }

  SUBCASE("vocabulary, images and static UI") {
    auto res = cli.Get("/api/vocabulary");
    REQUIRE(res);
    CHECK(json::parse(res->body) == json(TagVocabulary::disaster_default().tags()));
    res = cli.Get("/api/image/img-0");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "\x89PNG fake");
    CHECK(res->get_header_value("Content-Type") == "image/png");
    CHECK(cli.Get("/api/image/img-1")->status == 404);
    CHECK(cli.Get("/api/image/nope")->status == 404);
    res = cli.Get("/index.html");
    REQUIRE(res);
    CHECK(res->body == "<html>ui</html>");
  }
}

TEST_CASE("concurrent HTTP clients respect pair uniqueness") {
  AnnotationStore store(vsent::testing::make_pool(6), TagVocabulary::disaster_default(), {}, 9);
  RunningServer server(store);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&server, w] {
      auto cli = server.client();
      // Two workers share each participant id to force races; each loops
      // until its participant is exhausted.
      const auto pid = "p" + std::to_string(w % 2);
      for (int guard = 0; guard < 100; ++guard) {
        auto res = cli.Get(("/api/task?participant=" + pid).c_str());
        if (!res || res->status != 200) break;
        const auto image = json::parse(res->body).at("image_id").get<std::string>();
        cli.Post("/api/response", body(pid, image, {"shock"}), "application/json");
      }
    });
  }
  for (auto& t : workers) t.join();
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& r : store.responses()) CHECK(pairs.insert({r.participant_id, r.image_id}).second);
  CHECK(store.responses().size() == 12);
}
