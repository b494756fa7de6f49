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

#include <stdexcept>
#include <string>

namespace vsent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file or record could not be read or decoded. Carries the offending id
/// (an image id, a path, a line number) so batch callers can report it.
class DataError : public Error {
 public:
  DataError(std::string subject, const std::string& what)
      : Error(subject + ": " + what), subject_(std::move(subject)) {}

  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string subject_;
};

/// Every query handed to ingest() failed.
class IngestError : public Error {
 public:
  using Error::Error;
};

/// A submitted annotation failed validation (unknown tag, empty selection,
/// unknown image).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The (participant, image) pair already has a stored response.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// Training diverged or could not start.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// An experiment or tool was configured with missing or inconsistent inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsent
