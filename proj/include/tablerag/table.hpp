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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tablerag {

struct Column {
    std::string name;
    std::vector<std::string> cells;

    friend bool operator==(const Column&, const Column&) = default;
};

/// Immutable columnar table of raw text cells. Typing is applied on demand
/// (schema summaries, the expression interpreter), never stored here.
class Table {
public:
    /// Throws FormatError when there are no columns, when column names
    /// repeat, or when columns differ in length.
    Table(std::string title, std::vector<Column> columns);

    const std::string& title() const { return title_; }
    std::size_t n_rows() const { return columns_.front().cells.size(); }
    std::size_t n_cols() const { return columns_.size(); }

    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(std::size_t j) const { return columns_.at(j); }
    const std::string& cell(std::size_t row, std::size_t col) const { return columns_[col].cells[row]; }
    std::vector<std::string> column_names() const;
    std::optional<std::size_t> find_column(std::string_view name) const;

    /// Sub-table keeping the given rows and columns in the order given.
    Table select(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;
    Table head(std::size_t n) const;

    friend bool operator==(const Table&, const Table&) = default;

private:
    std::string title_;
    std::vector<Column> columns_;
};

enum class ColumnDType { integer, floating, datetime, categorical };

std::string_view dtype_name(ColumnDType dtype);
/// Name as a dataframe library would print it: int64, float64, datetime64[ns], object.
std::string_view dtype_frame_name(ColumnDType dtype);

/// Per-column summary shown to the solver: numeric/datetime columns carry
/// min/max, categorical columns carry their three most frequent values.
struct ColumnSchema {
    std::string column_name;
    ColumnDType dtype = ColumnDType::categorical;
    std::optional<std::string> min;
    std::optional<std::string> max;
    std::vector<std::string> cell_examples;
    std::size_t null_count = 0;

    friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

/// A distinct (column, value) pair and how often it occurs.
struct CellPair {
    std::string column_name;
    std::string value;
    std::size_t frequency = 0;

    friend bool operator==(const CellPair&, const CellPair&) = default;
};

struct CorpusStats {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::size_t n_cells = 0;
    std::size_t n_distinct = 0;
    std::size_t n_categorical_cols = 0;

    friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// integer if every non-null cell is an integer, else floating if every one
/// is a decimal, else datetime if every one is ISO-8601, else categorical.
/// All-null input is categorical.
ColumnDType infer_column_type(std::span<const std::string> values);

ColumnSchema summarize_column(const Column& column);
std::vector<ColumnSchema> build_schema(const Table& table);

/// Every distinct non-null (column, trimmed value) pair, by frequency
/// descending, then column name, then value.
std::vector<CellPair> distinct_pairs_by_freq(const Table& table);

CorpusStats table_stats(const Table& table);

}  // namespace tablerag
