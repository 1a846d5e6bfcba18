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


#include "tablerag/table.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "tablerag/errors.hpp"
#include "tablerag/text.hpp"

namespace tablerag {

Table::Table(std::string title, std::vector<Column> columns)
    : title_(std::move(title)), columns_(std::move(columns)) {
    if (columns_.empty()) throw FormatError("table has no columns");
    std::unordered_set<std::string> seen;
    for (const auto& col : columns_) {
        if (!seen.insert(col.name).second) throw FormatError("duplicate column name '" + col.name + "'");
        if (col.cells.size() != columns_.front().cells.size()) {
            throw FormatError("column '" + col.name + "' has " + std::to_string(col.cells.size()) +
                              " cells, expected " + std::to_string(columns_.front().cells.size()));
        }
    }
}

std::vector<std::string> Table::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& col : columns_) names.push_back(col.name);
    return names;
}

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (columns_[j].name == name) return j;
    }
    return std::nullopt;
}

Table Table::select(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
    std::vector<Column> out;
    out.reserve(cols.size());
    for (auto j : cols) {
        const auto& src = columns_.at(j);
        Column col{src.name, {}};
        col.cells.reserve(rows.size());
        for (auto i : rows) col.cells.push_back(src.cells.at(i));
        out.push_back(std::move(col));
    }
    return Table(title_, std::move(out));
}

Table Table::head(std::size_t n) const {
    std::vector<Column> out = columns_;
    for (auto& col : out) {
        if (col.cells.size() > n) col.cells.resize(n);
    }
    return Table(title_, std::move(out));
}

std::string_view dtype_name(ColumnDType dtype) {
    switch (dtype) {
        case ColumnDType::integer: return "integer";
        case ColumnDType::floating: return "float";
        case ColumnDType::datetime: return "datetime";
        case ColumnDType::categorical: return "categorical";
    }
    return "categorical";
}

std::string_view dtype_frame_name(ColumnDType dtype) {
    switch (dtype) {
        case ColumnDType::integer: return "int64";
        case ColumnDType::floating: return "float64";
        case ColumnDType::datetime: return "datetime64[ns]";
        case ColumnDType::categorical: return "object";
    }
    return "object";
}

ColumnDType infer_column_type(std::span<const std::string> values) {
    bool any = false;
    bool all_int = true;
    bool all_num = true;
    bool all_date = true;
    for (const auto& raw : values) {
        if (text::is_null_marker(raw)) continue;
        any = true;
        auto v = text::trim(raw);
        if (all_int && !text::parse_int64(v)) all_int = false;
        if (!all_int && all_num && !text::parse_decimal(v)) all_num = false;
        if (!all_num && all_date && !text::parse_iso_datetime(v)) all_date = false;
        if (!all_date) break;
    }
    if (!any) return ColumnDType::categorical;
    if (all_int) return ColumnDType::integer;
    if (all_num) return ColumnDType::floating;
    if (all_date) return ColumnDType::datetime;
    return ColumnDType::categorical;
}

namespace {

double sort_key(ColumnDType dtype, std::string_view v) {
    switch (dtype) {
        case ColumnDType::floating: return *text::parse_decimal(v);
        case ColumnDType::datetime: return *text::parse_iso_datetime(v);
        default: break;
    }
    return 0.0;
}

// Frequency ordering shared by the schema examples and the cell corpus.
template <typename Pair>
bool by_frequency(const Pair& a, const Pair& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
}

}  // namespace

ColumnSchema summarize_column(const Column& column) {
    ColumnSchema schema;
    schema.column_name = column.name;
    schema.dtype = infer_column_type(column.cells);

    if (schema.dtype == ColumnDType::categorical) {
        std::unordered_map<std::string_view, std::size_t> counts;
        for (const auto& raw : column.cells) {
            if (text::is_null_marker(raw)) {
                ++schema.null_count;
                continue;
            }
            ++counts[text::trim(raw)];
        }
        std::vector<std::pair<std::string_view, std::size_t>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), by_frequency<std::pair<std::string_view, std::size_t>>);
        for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
            schema.cell_examples.emplace_back(ranked[i].first);
        }
        return schema;
    }

    // Integers compare exactly; doubles would tie beyond 2^53.
    std::optional<std::pair<double, std::string_view>> lo, hi;
    for (const auto& raw : column.cells) {
        if (text::is_null_marker(raw)) {
            ++schema.null_count;
            continue;
        }
        auto v = text::trim(raw);
        if (schema.dtype == ColumnDType::integer) {
            auto iv = *text::parse_int64(v);
            if (!lo || iv < *text::parse_int64(lo->second)) lo.emplace(0.0, v);
            if (!hi || iv > *text::parse_int64(hi->second)) hi.emplace(0.0, v);
            continue;
        }
        double key = sort_key(schema.dtype, v);
        if (!lo || key < lo->first) lo.emplace(key, v);
        if (!hi || key > hi->first) hi.emplace(key, v);
    }
    schema.min = std::string(lo->second);
    schema.max = std::string(hi->second);
    return schema;
}

std::vector<ColumnSchema> build_schema(const Table& table) {
    std::vector<ColumnSchema> out;
    out.reserve(table.n_cols());
    for (const auto& col : table.columns()) out.push_back(summarize_column(col));
    return out;
}

std::vector<CellPair> distinct_pairs_by_freq(const Table& table) {
    std::vector<CellPair> pairs;
    for (const auto& col : table.columns()) {
        std::unordered_map<std::string_view, std::size_t> counts;
        for (const auto& raw : col.cells) {
            if (text::is_null_marker(raw)) continue;
            ++counts[text::trim(raw)];
        }
        for (const auto& [value, freq] : counts) pairs.push_back({col.name, std::string(value), freq});
    }
    std::sort(pairs.begin(), pairs.end(), [](const CellPair& a, const CellPair& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        if (a.column_name != b.column_name) return a.column_name < b.column_name;
        return a.value < b.value;
    });
    return pairs;
}

CorpusStats table_stats(const Table& table) {
    CorpusStats stats;
    stats.n_rows = table.n_rows();
    stats.n_cols = table.n_cols();
    stats.n_cells = stats.n_rows * stats.n_cols;
    stats.n_distinct = distinct_pairs_by_freq(table).size();
    for (const auto& col : table.columns()) {
        if (infer_column_type(col.cells) == ColumnDType::categorical) ++stats.n_categorical_cols;
    }
    return stats;
}

}  // namespace tablerag
