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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tablerag/corpus.hpp"
#include "tablerag/solver.hpp"
#include "tablerag/table.hpp"

namespace tablerag {

inline constexpr std::size_t kDefaultContextLimit = 16000;
inline constexpr std::size_t kRowColTextCap = 512;  // code points per embedded row/column text

/// Header plus rows as CSV, without a trailing newline.
std::string table_csv_text(const Table& table);

/// Whole table in the prompt. nullopt when the prompt exceeds
/// `context_limit_tokens`, which callers treat as a failed instance.
std::optional<SolverPrompt> read_table_prompt(const Table& table, std::string_view question,
                                              std::size_t context_limit_tokens = kDefaultContextLimit,
                                              SolverTool tool = SolverTool::table_expr);

/// Column names and dtypes only.
SolverPrompt read_schema_prompt(const Table& table, std::string_view question,
                                SolverTool tool = SolverTool::table_expr);

/// Prompt showing a sub-table (rand_row and rowcol baselines).
SolverPrompt sub_table_prompt(const Table& sub, std::string_view question, SolverTool tool = SolverTool::table_expr);

/// K rows drawn uniformly without replacement, in original order.
Table rand_row_sample(const Table& table, std::size_t k, std::uint64_t seed);

/// floor(B / 2M). Throws InvalidTarget when B < 2M.
std::size_t rowcol_row_cap(std::size_t budget, std::size_t n_cols);

/// "col=val; col=val; ..." capped at kRowColTextCap code points.
std::string rowcol_row_text(const Table& table, std::size_t row);
/// "name: v1, v2, ..." over the first `n_rows` rows, same cap.
std::string rowcol_column_text(const Table& table, std::size_t col, std::size_t n_rows);

/// Row and column embeddings of the truncated table; built once per table.
struct RowColIndex {
    std::size_t row_cap = 0;
    std::size_t n_rows = 0;  // rows kept after truncation
    std::vector<EmbeddingVector> rows;
    std::vector<EmbeddingVector> cols;
};

RowColIndex build_rowcol_index(const Table& table, std::size_t budget, const Encoder& encoder);

struct RowColSelection {
    std::vector<std::size_t> rows;  // ascending
    std::vector<std::size_t> cols;  // ascending
};

/// Top-K rows and top-K columns by cosine against the question; ties go to
/// the lower index.
RowColSelection rowcol_select(const RowColIndex& index, std::span<const float> question, std::size_t k);

Table rowcol_retrieve(const Table& table, std::string_view question, std::size_t k, std::size_t budget,
                      const Encoder& encoder);

}  // namespace tablerag
