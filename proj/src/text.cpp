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


#include "tablerag/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace tablerag::text {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<int> fixed_int(std::string_view s, std::size_t pos, std::size_t len) {
    if (pos + len > s.size()) return std::nullopt;
    auto part = s.substr(pos, len);
    if (!all_digits(part)) return std::nullopt;
    int value = 0;
    std::from_chars(part.data(), part.data() + part.size(), value);
    return value;
}

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && to_lower(a) == to_lower(b);
}

bool is_null_marker(std::string_view cell) {
    auto t = trim(cell);
    return t.empty() || iequals(t, "na") || iequals(t, "n/a") || iequals(t, "null");
}

std::optional<std::int64_t> parse_int64(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
        if (!s.empty() && s.front() == '-') return std::nullopt;
    }
    if (s.empty()) return std::nullopt;
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<double> parse_decimal(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
        if (!s.empty() && s.front() == '-') return std::nullopt;
    }
    if (s.empty()) return std::nullopt;
    // Reject inf/nan/hex spellings that from_chars would accept.
    bool has_digit = false;
    for (char c : s) {
        if (c >= '0' && c <= '9') {
            has_digit = true;
        } else if (c != '-' && c != '.' && c != 'e' && c != 'E' && c != '+') {
            return std::nullopt;
        }
    }
    if (!has_digit) return std::nullopt;
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<double> parse_iso_datetime(std::string_view s) {
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto year = fixed_int(s, 0, 4);
    auto month = fixed_int(s, 5, 2);
    auto day = fixed_int(s, 8, 2);
    if (!year || !month || !day) return std::nullopt;
    if (*month < 1 || *month > 12 || *day < 1 || *day > days_in_month(*year, *month)) return std::nullopt;

    double seconds = static_cast<double>(days_from_civil(*year, static_cast<unsigned>(*month),
                                                         static_cast<unsigned>(*day))) *
                     86400.0;
    if (s.size() == 10) return seconds;

    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto hour = fixed_int(s, 11, 2);
    if (!hour || s.size() < 16 || s[13] != ':') return std::nullopt;
    auto minute = fixed_int(s, 14, 2);
    if (!minute || *hour > 23 || *minute > 59) return std::nullopt;
    seconds += *hour * 3600.0 + *minute * 60.0;

    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        auto sec = fixed_int(s, pos + 1, 2);
        if (!sec || *sec > 60) return std::nullopt;
        seconds += *sec;
        pos += 3;
        if (pos < s.size() && s[pos] == '.') {
            std::size_t start = ++pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
            if (pos == start) return std::nullopt;
            double frac = 0;
            std::from_chars(s.data() + start - 1, s.data() + pos, frac);  // parses ".ddd"
            seconds += frac;
        }
    }
    if (pos == s.size()) return seconds;
    if (s[pos] == 'Z' && pos + 1 == s.size()) return seconds;
    if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
        auto oh = fixed_int(s, pos + 1, 2);
        auto om = fixed_int(s, pos + 4, 2);
        if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
        double offset = *oh * 3600.0 + *om * 60.0;
        return s[pos] == '+' ? seconds - offset : seconds + offset;
    }
    return std::nullopt;
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    std::string out(buf);
    if (out == "-0") out = "0";
    return out;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string_view utf8_prefix(std::string_view s, std::size_t max_chars) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto c = static_cast<unsigned char>(s[i]);
        if ((c & 0xC0) != 0x80) {
            if (count == max_chars) return s.substr(0, i);
            ++count;
        }
    }
    return s;
}

std::vector<std::string> split_outside_quotes(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::string current;
    bool quoted = false;
    for (char c : s) {
        if (c == '"') {
            quoted = !quoted;
            current.push_back(c);
        } else if (c == sep && !quoted) {
            parts.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(std::move(current));
    return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

}  // namespace tablerag::text
