// Copyright 2026 The UQI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"
#include "uqi/linalg.hpp"

namespace uqi::io {

using Json = nlohmann::json;

inline constexpr const char *kArtifactVersion = "1.0.0";

/// Malformed input: unreadable file, bad JSON, missing keys or wrong types.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Rows of [re, im] pairs. Shape problems raise ParseError naming `field`;
/// an empty or non-square result raises InvariantError.
Matrix matrix_from_json(const Json &j, const std::string &field);
Json matrix_to_json(const Matrix &m);
/// List of [re, im] pairs.
Vector vector_from_json(const Json &j, const std::string &field);
Json vector_to_json(const Vector &v);

bool is_known_command(const std::string &command);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iters;
    std::optional<double> tol;
};

/// A validated run: the effective config document (overrides merged in) and
/// the prepared computation.
struct PreparedRun {
    std::string command;
    Json config;
    std::function<Json()> execute;
};

/// Checks the document and builds every domain object. Throws ParseError
/// for malformed input and InvariantError / DimensionError for values that
/// violate an invariant.
PreparedRun prepare(const std::string &command, Json config, const Overrides &overrides);

Json make_report(const PreparedRun &run, const Json &results, double wall_time_s);

/// `duration,median_infidelity` rows from a scan results payload.
std::string scan_csv(const Json &results);

/// Writes through a temporary file in the same directory and renames it
/// into place.
void write_atomic(const std::filesystem::path &path, const std::string &contents);

Json read_json_file(const std::filesystem::path &path);

}  // namespace uqi::io
