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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace vsent {

class AnnotationStore;

/// HTTP front of an AnnotationStore.
///
///     GET  /api/task?participant=<id>  200 task JSON, or 204 when done
///     POST /api/response               201 stored, 409 duplicate pair,
///                                      422 validation failure, 400 bad JSON
///     GET  /api/stats                  tag counts and co-occurrence
///     GET  /api/image/<id>             raw image bytes
///     GET  /api/vocabulary             the tag list
///
/// When a static directory is given it is mounted at "/" for the browser UI.
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore& store,
                            std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds and serves until stop(). Port 0 picks a free port, readable via
  /// port() once bound. Returns false if binding failed.
  bool listen(const std::string& host, int port);

  /// Binds without serving; pair with serve() on another thread. Returns the
  /// bound port or -1.
  int bind(const std::string& host, int port);
  bool serve();

  void stop();
  int port() const noexcept { return port_; }
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

}  // namespace vsent
