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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tablerag/table.hpp"

namespace tablerag {

/// A column as the interpreter sees it: raw text plus parsed numbers for
/// numeric and datetime columns (datetime as epoch seconds).
struct FrameColumn {
    std::string name;
    ColumnDType dtype = ColumnDType::categorical;
    std::vector<std::string> text;               // trimmed cell text, "" for null
    std::vector<std::optional<double>> numbers;  // empty for categorical

    bool is_null(std::size_t row) const;
    /// Cell as shown in observations.
    std::string render(std::size_t row) const;
};

struct Frame {
    std::vector<FrameColumn> columns;
    std::size_t n_rows = 0;

    const FrameColumn* find(std::string_view name) const;
    Frame take_rows(const std::vector<std::size_t>& rows) const;
};

Frame make_frame(const Table& table);

/// Renders a frame: CSV header, the first `max_rows` rows and a
/// "[N rows x M columns]" footer. An empty frame renders as
/// "Empty table" followed by its column list.
std::string render_frame(const Frame& frame, std::size_t max_rows = 5);

/// Interpreter state for one solver run. Actions are single lines of stages
/// joined by "|>":
///
///   filter(col, op, value)   op: == != < <= > >=
///   contains(col, "text")    case-insensitive substring filter
///   project(col, ...)        keep columns
///   sort(col, asc|desc)      stable, nulls last
///   head(n)
///   distinct(col)            one-column frame of distinct values
///   cast(col, int|float|datetime|str)
///   agg(col, mean|sum|min|max|count)   must be the last stage
///
/// Casts rewrite the environment and persist into later actions; every other
/// stage works on a copy. A leading `df` stage is accepted and ignored.
class TableEnv {
public:
    explicit TableEnv(const Table& table);

    /// Never throws: failures come back as "Error: <reason>".
    std::string execute(std::string_view action);

    const Frame& frame() const { return frame_; }

private:
    Frame frame_;
};

/// One-shot evaluation against a fresh environment.
std::string interpret_action(const Table& table, std::string_view action);

}  // namespace tablerag
