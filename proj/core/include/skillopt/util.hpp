// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 skillopt contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace skillopt::util {

/// 64-bit FNV-1a of `data`, rendered as 16 lowercase hex digits. Stable across
/// platforms; used for prompt fingerprints and embedding-file keys.
std::string fnv1a64_hex(std::string_view data);

std::string to_lower(std::string_view s);

/// Trims ASCII whitespace from both ends.
std::string trim(std::string_view s);

/// Lowercases and collapses every run of whitespace to a single space.
std::string normalize_ws(std::string_view s);

/// Strips everything but lowercase alphanumerics ("When to use" -> "whentouse").
std::string label_key(std::string_view s);

/// Splits on `sep`, trims each piece, and drops empties.
std::vector<std::string> split_list(std::string_view s, char sep = ';');

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::vector<std::string> split_lines(std::string_view text);

/// Strips trailing whitespace per line and trailing blank lines; the canonical
/// form used when comparing program output against expected output.
std::string normalize_output(std::string_view text);

std::string read_file(const std::filesystem::path& path);  // MissingFile on failure
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace skillopt::util
