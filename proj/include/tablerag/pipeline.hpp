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

#include <string>
#include <string_view>
#include <vector>

#include "tablerag/corpus.hpp"
#include "tablerag/query_expansion.hpp"
#include "tablerag/retrieval.hpp"
#include "tablerag/solver.hpp"

namespace tablerag {

struct TableIndexes {
    SchemaIndex schema;
    CellIndex cells;
    CorpusStats stats;
};

TableIndexes build_indexes(const Table& table, EncodingBudget budget, const Encoder& encoder);

struct TableRagPrompt {
    QueryBundle queries;
    std::vector<ScoredHit> schema_hits;
    std::vector<ScoredHit> cell_hits;
    SolverPrompt prompt;
};

/// Query expansion, schema and cell retrieval, prompt assembly.
TableRagPrompt prepare_tablerag_prompt(std::string_view title, std::string_view question, const TableIndexes& indexes,
                                       ChatModel& lm, const Encoder& encoder, const RetrievalConfig& config,
                                       SolverTool tool = SolverTool::table_expr);

}  // namespace tablerag
