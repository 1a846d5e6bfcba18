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


#include "tablerag/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/ingestion.hpp"
#include "tablerag/random.hpp"
#include "tablerag/retrieval.hpp"
#include "tablerag/text.hpp"

namespace tablerag {

std::string table_csv_text(const Table& table) {
    std::ostringstream out;
    write_table_csv(table, out);
    auto s = out.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

namespace {

SolverPrompt with_all_columns(SolverPrompt p, const Table& table, bool include_cells) {
    p.columns_shown = table.column_names();
    p.included_schema_hits = table.n_cols();
    if (include_cells) {
        for (const auto& pair : distinct_pairs_by_freq(table)) p.cells_shown.emplace_back(pair.column_name, pair.value);
        p.included_cell_hits = p.cells_shown.size();
    }
    return p;
}

}  // namespace

std::optional<SolverPrompt> read_table_prompt(const Table& table, std::string_view question,
                                              std::size_t context_limit_tokens, SolverTool tool) {
    if (context_limit_tokens < 1) throw InvalidTarget("context limit must be at least 1 token");
    auto p = render_solver_prompt(table.title(), question,
                                  "Here is the full table in CSV format.\n\n" + table_csv_text(table), tool);
    if (p.token_count > context_limit_tokens) return std::nullopt;
    return with_all_columns(std::move(p), table, true);
}

SolverPrompt read_schema_prompt(const Table& table, std::string_view question, SolverTool tool) {
    std::vector<std::string> lines;
    for (const auto& col : table.columns()) {
        auto dtype = infer_column_type(col.cells);
        lines.push_back("{\"column_name\": " +
                        nlohmann::json(col.name).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) +
                        ", \"dtype\": \"" + std::string(dtype_frame_name(dtype)) + "\"}");
    }
    auto context = "Since you cannot view the table directly, here is the schema of the table.\n\nSchema:\n" +
                   text::join(lines, "\n");
    return with_all_columns(render_solver_prompt(table.title(), question, context, tool), table, false);
}

SolverPrompt sub_table_prompt(const Table& sub, std::string_view question, SolverTool tool) {
    auto context = "Since you cannot view the whole table, here are some of its rows in CSV format.\n\n" +
                   table_csv_text(sub);
    return with_all_columns(render_solver_prompt(sub.title(), question, context, tool), sub, true);
}

Table rand_row_sample(const Table& table, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw InvalidTarget("rand_row needs K >= 1");
    Rng rng(seed);
    auto rows = sample_sorted(rng, table.n_rows(), k);
    std::vector<std::size_t> cols(table.n_cols());
    std::iota(cols.begin(), cols.end(), 0);
    return table.select(rows, cols);
}

std::size_t rowcol_row_cap(std::size_t budget, std::size_t n_cols) {
    if (n_cols == 0 || budget < 2 * n_cols) {
        throw InvalidTarget("row/column retrieval needs B >= 2M (B=" + std::to_string(budget) +
                            ", M=" + std::to_string(n_cols) + ")");
    }
    return budget / (2 * n_cols);
}

std::string rowcol_row_text(const Table& table, std::size_t row) {
    std::string out;
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        if (j) out += "; ";
        out += table.column(j).name + "=" + std::string(text::trim(table.cell(row, j)));
        if (text::utf8_length(out) >= kRowColTextCap) break;
    }
    return std::string(text::utf8_prefix(out, kRowColTextCap));
}

std::string rowcol_column_text(const Table& table, std::size_t col, std::size_t n_rows) {
    std::string out = table.column(col).name + ":";
    for (std::size_t i = 0; i < n_rows && i < table.n_rows(); ++i) {
        out += (i ? ", " : " ") + std::string(text::trim(table.cell(i, col)));
        if (text::utf8_length(out) >= kRowColTextCap) break;
    }
    return std::string(text::utf8_prefix(out, kRowColTextCap));
}

RowColIndex build_rowcol_index(const Table& table, std::size_t budget, const Encoder& encoder) {
    RowColIndex index;
    index.row_cap = rowcol_row_cap(budget, table.n_cols());
    index.n_rows = std::min(index.row_cap, table.n_rows());
    std::vector<std::string> row_texts;
    for (std::size_t i = 0; i < index.n_rows; ++i) row_texts.push_back(rowcol_row_text(table, i));
    std::vector<std::string> col_texts;
    for (std::size_t j = 0; j < table.n_cols(); ++j) col_texts.push_back(rowcol_column_text(table, j, index.n_rows));
    if (!row_texts.empty()) index.rows = encode_in_batches(encoder, row_texts);
    index.cols = encode_in_batches(encoder, col_texts);
    return index;
}

namespace {

std::vector<std::size_t> top_by_cosine(const std::vector<EmbeddingVector>& vecs, std::span<const float> q,
                                       std::size_t k) {
    std::vector<double> score(vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        if (vecs[i].size() != q.size()) throw DimMismatch("question embedding dimension differs from the index");
        score[i] = cosine(vecs[i], q);
    }
    std::vector<std::size_t> order(vecs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    order.resize(std::min(k, order.size()));
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace

RowColSelection rowcol_select(const RowColIndex& index, std::span<const float> question, std::size_t k) {
    if (k < 1) throw InvalidTarget("rowcol needs K >= 1");
    return {top_by_cosine(index.rows, question, k), top_by_cosine(index.cols, question, k)};
}

Table rowcol_retrieve(const Table& table, std::string_view question, std::size_t k, std::size_t budget,
                      const Encoder& encoder) {
    auto index = build_rowcol_index(table, budget, encoder);
    auto q = encoder.embed(std::string(question));
    auto sel = rowcol_select(index, q, k);
    return table.select(sel.rows, sel.cols);
}

}  // namespace tablerag
