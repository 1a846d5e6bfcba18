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


#include "tablerag/pipeline.hpp"

namespace tablerag {

TableIndexes build_indexes(const Table& table, EncodingBudget budget, const Encoder& encoder) {
    return {build_schema_db(table, encoder), build_cell_db(table, budget, encoder), table_stats(table)};
}

TableRagPrompt prepare_tablerag_prompt(std::string_view title, std::string_view question, const TableIndexes& indexes,
                                       ChatModel& lm, const Encoder& encoder, const RetrievalConfig& config,
                                       SolverTool tool) {
    TableRagPrompt out;
    out.queries = expand_queries(question, title, lm);
    out.schema_hits = multi_query_retrieve(out.queries.schema_queries, indexes.schema.corpus, encoder, config);
    out.cell_hits = multi_query_retrieve(out.queries.cell_queries, indexes.cells.corpus, encoder, config);

    std::vector<ColumnSchema> schemas;
    for (const auto& h : out.schema_hits) schemas.push_back(indexes.schema.payloads[h.entry]);
    std::vector<CellPair> cells;
    for (const auto& h : out.cell_hits) cells.push_back(indexes.cells.payloads[h.entry]);
    out.prompt = assemble_prompt(title, question, schemas, cells, out.queries.cell_queries, tool);
    return out;
}

}  // namespace tablerag
