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


#include "tablerag/synthetic.hpp"

#include <array>
#include <cstdio>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/random.hpp"
#include "tablerag/text.hpp"

namespace tablerag {

namespace {

constexpr std::array<const char*, 12> kWords = {"amber", "birch", "cobalt", "delta", "ember", "fjord",
                                                "granite", "harbor", "indigo", "juniper", "kestrel", "lumen"};

// Inverse of days_from_civil (H. Hinnant).
std::string civil_date(std::int64_t days) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const auto doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
    return buf;
}

std::vector<std::string> filler_pool(Rng& rng) {
    const auto kind = uniform_below(rng, 4);
    const auto size = 2 + static_cast<std::size_t>(uniform_below(rng, 5));
    std::vector<std::string> pool;
    std::set<std::string> seen;
    while (pool.size() < size) {
        std::string v;
        switch (kind) {
            case 0: v = std::to_string(uniform_below(rng, 1000)); break;
            case 1: {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f", static_cast<double>(uniform_below(rng, 100000)) / 100.0);
                v = buf;
                break;
            }
            case 2: v = civil_date(10957 + static_cast<std::int64_t>(uniform_below(rng, 3650))); break;  // from 2000-01-01
            default: v = kWords[uniform_below(rng, kWords.size())]; break;
        }
        if (seen.insert(v).second) pool.push_back(std::move(v));
    }
    return pool;
}

bool same_value(std::string_view a, std::string_view b) {
    a = text::trim(a);
    b = text::trim(b);
    if (a == b) return true;
    auto x = text::parse_decimal(a);
    auto y = text::parse_decimal(b);
    return x && y && *x == *y;
}

// Non-null values of an original column with multiplicity, minus gold values.
std::vector<std::string> donor_values(const Column& col,
                                      std::span<const std::pair<std::string, std::string>> gold_cells) {
    std::vector<std::string> out;
    for (const auto& cell : col.cells) {
        if (text::is_null_marker(cell)) continue;
        bool gold = false;
        for (const auto& [gc, gv] : gold_cells) {
            if (gc == col.name && same_value(cell, gv)) {
                gold = true;
                break;
            }
        }
        if (!gold) out.push_back(cell);
    }
    return out;
}

}  // namespace

ExpandedTable expand_table_synthetic(const Table& table, std::size_t target_rows, std::size_t target_cols,
                                     std::uint64_t seed,
                                     std::span<const std::pair<std::string, std::string>> gold_cells) {
    const std::size_t n = table.n_rows();
    const std::size_t m = table.n_cols();
    if (target_rows < n || target_cols < m) {
        throw InvalidTarget("expansion target " + std::to_string(target_rows) + "x" + std::to_string(target_cols) +
                            " is smaller than the source table " + std::to_string(n) + "x" + std::to_string(m));
    }
    Rng rng(seed);
    PositionMap map{sample_sorted(rng, target_rows, n), sample_sorted(rng, target_cols, m)};

    std::vector<long> row_origin(target_rows, -1);
    for (std::size_t i = 0; i < n; ++i) row_origin[map.rows[i]] = static_cast<long>(i);
    std::vector<long> col_origin(target_cols, -1);
    for (std::size_t j = 0; j < m; ++j) col_origin[map.cols[j]] = static_cast<long>(j);

    std::unordered_set<std::string> taken;
    for (const auto& name : table.column_names()) taken.insert(name);
    std::size_t next_extra = 1;

    std::vector<Column> columns;
    columns.reserve(target_cols);
    for (std::size_t c = 0; c < target_cols; ++c) {
        Column out;
        out.cells.reserve(target_rows);
        if (col_origin[c] >= 0) {
            const auto& src = table.column(static_cast<std::size_t>(col_origin[c]));
            out.name = src.name;
            auto donors = donor_values(src, gold_cells);
            for (std::size_t r = 0; r < target_rows; ++r) {
                if (row_origin[r] >= 0) {
                    out.cells.push_back(src.cells[static_cast<std::size_t>(row_origin[r])]);
                } else if (donors.empty()) {
                    out.cells.emplace_back();
                } else {
                    out.cells.push_back(donors[uniform_below(rng, donors.size())]);
                }
            }
        } else {
            do {
                out.name = "extra_" + std::to_string(next_extra++);
            } while (taken.count(out.name));
            auto pool = filler_pool(rng);
            for (std::size_t r = 0; r < target_rows; ++r) out.cells.push_back(pool[uniform_below(rng, pool.size())]);
        }
        columns.push_back(std::move(out));
    }
    return {Table(table.title(), std::move(columns)), std::move(map)};
}

std::string position_map_json(const PositionMap& map) {
    nlohmann::ordered_json j;
    j["rows"] = map.rows;
    j["cols"] = map.cols;
    return j.dump(2) + "\n";
}

}  // namespace tablerag
