// Copyright (C) 2026 The TSA toolkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tsa::text {

/// Shortest decimal form that parses back to exactly `value`.
std::string format_double(double value);

std::string_view trim(std::string_view s);
/// Drops everything from the first '#'.
std::string_view strip_comment(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Strict parsers: the whole token must be consumed. `what` names the field
/// in the DataError thrown on failure.
double parse_double(std::string_view token, const std::string& what);
std::uint64_t parse_uint(std::string_view token, const std::string& what);
std::int64_t parse_int(std::string_view token, const std::string& what);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace tsa::text
