// SPDX-License-Identifier: Apache-2.0
#pragma once

// Canonical number formatting and hashing shared by every file writer.
// All floats are rounded to 9 significant digits before serialization so
// repeated runs and read/write round trips are byte-identical.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace uavprop {

inline constexpr int kSignificantDigits = 9;

/// Rounds to 9 significant digits; -0 becomes 0. Non-finite input is rejected.
double canonical_double(double value);

/// Text form of canonical_double, "%.9g" style (used by CSV and SQL writers).
std::string format_double(double value);

/// Recursively rounds every floating-point number in a JSON document.
nlohmann::json canonicalize(const nlohmann::json& doc);

/// Sorted keys (nlohmann default), canonical numbers, compact or indented.
std::string canonical_dump(const nlohmann::json& doc, int indent = -1);

std::string sha256_hex(std::string_view data);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary file and renames, so readers never see partial output.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Parses JSON text, converting library exceptions into ConfigError with `what` as context.
nlohmann::json parse_json(std::string_view text, const std::string& what);

} // namespace uavprop
