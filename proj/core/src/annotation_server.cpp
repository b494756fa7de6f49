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
#include "vsent/annotation_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "vsent/annotation_store.hpp"
#include "vsent/error.hpp"
#include "vsent/log.hpp"
#include "vsent/text.hpp"

namespace vsent {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

void reply_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), kJson);
}

std::string content_type_for(const fs::path& p) {
  const auto ext = text::to_lower(p.extension().string());
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".webp") return "image/webp";
  if (ext == ".ppm" || ext == ".pgm") return "image/x-portable-anymap";
  return "application/octet-stream";
}

// Field-level decoding of a POST /api/response body. Type errors surface as
// ValidationError so they map to 422 rather than 400.
AnnotationResponse decode_response(const json& j) {
  if (!j.is_object()) throw ValidationError("body must be a JSON object");
  auto str_field = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw ValidationError(std::string(key) + " must be a string");
    return j[key].get<std::string>();
  };
  auto str_list = [&](const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key) || j[key].is_null()) return out;
    if (!j[key].is_array()) throw ValidationError(std::string(key) + " must be an array of strings");
    for (const auto& v : j[key]) {
      if (!v.is_string()) throw ValidationError(std::string(key) + " must be an array of strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  };
  AnnotationResponse r;
  r.participant_id = str_field("participant_id");
  r.image_id = str_field("image_id");
  const auto selected = str_list("selected_tags");
  r.selected_tags.insert(selected.begin(), selected.end());
  if (r.selected_tags.size() != selected.size()) throw ValidationError("selected_tags has duplicates");
  r.extra_tags = str_list("extra_tags");
  if (j.contains("timestamp") && !j["timestamp"].is_null()) {
    try {
      r.timestamp = parse_timestamp(str_field("timestamp"));
    } catch (const DataError& e) {
      throw ValidationError(e.what());
    }
  }
  return r;
}

}  // namespace

struct AnnotationServer::Impl {
  explicit Impl(AnnotationStore& s) : store(s) {}
  AnnotationStore& store;
  httplib::Server server;
};

AnnotationServer::AnnotationServer(AnnotationStore& store, std::optional<fs::path> static_dir)
    : impl_(std::make_unique<Impl>(store)) {
  auto& srv = impl_->server;
  auto& st = impl_->store;

  srv.Get("/api/task", [&st](const httplib::Request& req, httplib::Response& res) {
    const auto participant = req.get_param_value("participant");
    if (participant.empty()) return reply_error(res, 400, "missing participant parameter");
    const auto task = st.next_task(participant);
    if (!task) {
      res.status = 204;
      return;
    }
    json j = {{"image_id", task->image_id},
              {"image_uri", "/api/image/" + task->image_id},
              {"vocabulary", task->vocabulary.tags()}};
    res.set_content(j.dump(), kJson);
  });

  srv.Post("/api/response", [&st](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      return reply_error(res, 400, std::string("malformed JSON: ") + e.what());
    }
    try {
      const auto ack = st.submit(decode_response(body));
      res.status = 201;
      res.set_content(json{{"status", "stored"},
                           {"sequence", ack.sequence},
                           {"participant_id", ack.participant_id},
                           {"image_id", ack.image_id}}
                          .dump(),
                      kJson);
    } catch (const ConflictError& e) {
      reply_error(res, 409, e.what());
    } catch (const ValidationError& e) {
      reply_error(res, 422, e.what());
    }
  });

  srv.Get("/api/stats", [&st](const httplib::Request&, httplib::Response& res) {
    res.set_content(stats_to_json(st.stats()), kJson);
  });

  srv.Get("/api/vocabulary", [&st](const httplib::Request&, httplib::Response& res) {
    res.set_content(json(st.vocabulary().tags()).dump(), kJson);
  });

  srv.Get(R"(/api/image/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
    const auto* rec = st.find_image(req.matches[1].str());
    if (!rec) return reply_error(res, 404, "unknown image");
    try {
      res.set_content(text::read_file(rec->path), content_type_for(rec->path));
    } catch (const DataError& e) {
      reply_error(res, 404, e.what());
    }
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    log::error("annotation server: " + what);
    reply_error(res, 500, what);
  });

  if (static_dir && !srv.set_mount_point("/", static_dir->string()))
    throw ConfigError("cannot serve static directory " + static_dir->string());
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    port_ = srv.bind_to_any_port(host);
  } else {
    port_ = srv.bind_to_port(host, port) ? port : -1;
  }
  return port_;
}

bool AnnotationServer::serve() { return impl_->server.listen_after_bind(); }

bool AnnotationServer::listen(const std::string& host, int port) {
  if (bind(host, port) < 0) return false;
  return serve();
}

void AnnotationServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void AnnotationServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace vsent
