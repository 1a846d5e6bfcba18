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


#include <gtest/gtest.h>

#include "tablerag/text.hpp"

namespace text = tablerag::text;

TEST(TextTest, TrimAndLower) {
    EXPECT_EQ(text::trim("  a b \t\n"), "a b");
    EXPECT_EQ(text::trim("   "), "");
    EXPECT_EQ(text::to_lower("AbC1"), "abc1");
    EXPECT_TRUE(text::iequals("N/A", "n/a"));
    EXPECT_FALSE(text::iequals("na", "nan"));
}

TEST(TextTest, NullMarkers) {
    for (const char* s : {"", "  ", "NA", "na", " N/A ", "null", "NULL"}) EXPECT_TRUE(text::is_null_marker(s)) << s;
    for (const char* s : {"0", "none", "nan", "-", "nullable"}) EXPECT_FALSE(text::is_null_marker(s)) << s;
}

TEST(TextTest, ParseInt64IsStrict) {
    EXPECT_EQ(text::parse_int64("42"), 42);
    EXPECT_EQ(text::parse_int64("+7"), 7);
    EXPECT_EQ(text::parse_int64("-3"), -3);
    EXPECT_FALSE(text::parse_int64("4.0"));
    EXPECT_FALSE(text::parse_int64("12a"));
    EXPECT_FALSE(text::parse_int64("+-1"));
    EXPECT_FALSE(text::parse_int64(""));
    EXPECT_FALSE(text::parse_int64("99999999999999999999"));
}

TEST(TextTest, ParseDecimalRejectsSpecials) {
    EXPECT_DOUBLE_EQ(*text::parse_decimal("2.5"), 2.5);
    EXPECT_DOUBLE_EQ(*text::parse_decimal("-1e3"), -1000.0);
    EXPECT_DOUBLE_EQ(*text::parse_decimal(".5"), 0.5);
    for (const char* s : {"inf", "nan", "0x10", "1,000", "$5", "", "-", "1.2.3"}) {
        EXPECT_FALSE(text::parse_decimal(s)) << s;
    }
}

TEST(TextTest, IsoDatetime) {
    EXPECT_DOUBLE_EQ(*text::parse_iso_datetime("1970-01-01"), 0.0);
    EXPECT_DOUBLE_EQ(*text::parse_iso_datetime("1970-01-02"), 86400.0);
    EXPECT_DOUBLE_EQ(*text::parse_iso_datetime("2000-03-01"), 951868800.0);
    EXPECT_DOUBLE_EQ(*text::parse_iso_datetime("1970-01-01T01:02:03"), 3723.0);
    EXPECT_DOUBLE_EQ(*text::parse_iso_datetime("1970-01-01 01:00"), 3600.0);
    EXPECT_DOUBLE_EQ(*text::parse_iso_datetime("1970-01-01T01:00:00Z"), 3600.0);
    EXPECT_DOUBLE_EQ(*text::parse_iso_datetime("1970-01-01T01:00:00+01:00"), 0.0);
    EXPECT_TRUE(text::parse_iso_datetime("2024-02-29"));
    EXPECT_FALSE(text::parse_iso_datetime("2023-02-29"));
    EXPECT_FALSE(text::parse_iso_datetime("2023-13-01"));
    EXPECT_FALSE(text::parse_iso_datetime("01/02/2023"));
    EXPECT_FALSE(text::parse_iso_datetime("2023-01-01X"));
}

TEST(TextTest, FormatNumberUsesTwelveDigits) {
    EXPECT_EQ(text::format_number(200.0), "200");
    EXPECT_EQ(text::format_number(442.7916666666667), "442.791666667");
    EXPECT_EQ(text::format_number(-0.0), "0");
    EXPECT_EQ(text::format_number(0.1), "0.1");
}

TEST(TextTest, Utf8Helpers) {
    EXPECT_EQ(text::utf8_length("caf\xC3\xA9"), 4u);
    EXPECT_EQ(text::utf8_prefix("caf\xC3\xA9s", 4), "caf\xC3\xA9");
    EXPECT_EQ(text::utf8_prefix("abc", 10), "abc");
}

TEST(TextTest, SplitOutsideQuotes) {
    auto parts = text::split_outside_quotes("a,\"b,c\",d", ',');
    ASSERT_EQ(parts.size(), 3u);
    EXPECT_EQ(parts[1], "\"b,c\"");
    EXPECT_EQ(text::join({"x", "y"}, ", "), "x, y");
}
