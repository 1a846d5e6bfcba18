/*
 * Copyright 2026 The tablerag-cpp Authors
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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tablerag::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Empty string, "NA", "N/A" and "null" (any case, surrounding space ignored).
bool is_null_marker(std::string_view cell);

/// Strict parsers over already-trimmed text. Only the whole input counts.
std::optional<std::int64_t> parse_int64(std::string_view s);
std::optional<double> parse_decimal(std::string_view s);

/// ISO-8601 date ("2020-01-31") or datetime ("2020-01-31T08:00[:00[.000]]",
/// space separator accepted, optional "Z" or "+hh:mm" offset). Returns
/// seconds since the Unix epoch in UTC.
std::optional<double> parse_iso_datetime(std::string_view s);

/// printf "%.12g".
std::string format_number(double value);

/// Number of UTF-8 code points; invalid continuation bytes count as one each.
std::size_t utf8_length(std::string_view s);

/// Longest prefix holding at most `max_chars` code points.
std::string_view utf8_prefix(std::string_view s, std::size_t max_chars);

/// Splits on `sep`, honouring double-quoted sections.
std::vector<std::string> split_outside_quotes(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace tablerag::text
