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
#include <string>
#include <string_view>
#include <vector>

namespace vsent::text {

/// ASCII lowercase; bytes outside ASCII pass through unchanged.
std::string to_lower(std::string_view s);

std::string trim(std::string_view s);

/// Splits on `sep`, keeping empty fields.
std::vector<std::string> split(std::string_view s, char sep);

/// Splits on runs of ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

/// Strips one trailing 's' so that plural search keywords ("floods") compare
/// equal to singular event types ("flood").
std::string singular(std::string_view word);

/// Reads a line-oriented list file: one entry per line, surrounding
/// whitespace trimmed, blank lines and lines starting with '#' skipped.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

void write_list_file(const std::filesystem::path& path,
                     const std::vector<std::string>& entries);

std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace vsent::text
