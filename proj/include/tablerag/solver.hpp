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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tablerag/lm.hpp"
#include "tablerag/prompts.hpp"
#include "tablerag/table.hpp"

namespace tablerag {

struct SolverPrompt {
    std::string text;
    std::size_t token_count = 0;
    std::size_t included_schema_hits = 0;
    std::size_t included_cell_hits = 0;
    // What the prompt exposes, for retrieval metrics.
    std::vector<std::string> columns_shown;
    std::vector<std::pair<std::string, std::string>> cells_shown;
};

/// {"column_name": ..., "dtype": ..., "cell_examples": [...]} or with min/max.
std::string schema_line(const ColumnSchema& schema);
/// {"column_name": ..., "cell_value": ...}
std::string cell_line(const CellPair& cell);

/// Retrieved schema and cell block that replaces the table in the prompt.
std::string retrieval_context(std::span<const ColumnSchema> schema_hits, std::span<const CellPair> cell_hits,
                              std::span<const std::string> cell_queries);

/// Fills the solver template with an arbitrary table context.
SolverPrompt render_solver_prompt(std::string_view title, std::string_view question, std::string_view table_context,
                                  SolverTool tool = SolverTool::table_expr);

SolverPrompt assemble_prompt(std::string_view title, std::string_view question,
                             std::span<const ColumnSchema> schema_hits, std::span<const CellPair> cell_hits,
                             std::span<const std::string> cell_queries, SolverTool tool = SolverTool::table_expr);

struct ReActStep {
    std::string thought;
    std::string action;  // empty on the final step
    bool final = false;
    bool exhausted = false;  // set on the last step when the step limit ran out
    std::string observation;
    std::string reply;  // raw LM output for this step
};

struct Answer {
    std::string raw;
    std::vector<std::string> parts;
    std::vector<std::string> normalized;
    bool failed = false;
    std::string reason;

    static Answer failure(std::string reason);
};

struct SolverTrace {
    std::vector<ReActStep> steps;
    Answer answer;
    std::size_t total_prompt_tokens = 0;
};

struct SolverOptions {
    std::size_t max_steps = 10;
    double temperature = 0.8;
    std::size_t n_votes = 10;
    int max_output_tokens = 1024;
};

/// Thought/Action/Observation loop. Each LM call sees the prompt plus the
/// transcript so far and stops before "Observation:". A reply containing
/// "Final Answer:" ends the loop; otherwise its Action runs through the
/// interpreter. Running out of steps yields a failed answer. RemoteError and
/// ScriptExhausted propagate.
SolverTrace react_loop(ChatModel& lm, const Table& table, const SolverPrompt& prompt,
                       const SolverOptions& options = {});

/// Text after the last "Final Answer:" on that line, split on commas outside
/// double quotes (a comma inside a number such as 1,000 does not split).
/// Throws NoFinalAnswer when the marker is missing or nothing follows it.
Answer extract_final_answer(std::string_view reply);

/// Lower-case, trim, drop currency symbols and thousands separators.
std::string normalize_answer_part(std::string_view part);

/// Equal-size multisets matched pairwise; numeric parts compare with relative
/// tolerance 1e-6, others by normalised text.
bool normalize_and_match(const Answer& pred, std::span<const std::string> gold);

/// Most frequent answer by sorted normalised parts; ties go to the earliest.
/// Failed answers do not vote. Nothing left to vote on gives a failure.
Answer majority_vote(std::span<const Answer> answers);

struct VoteResult {
    Answer answer;
    std::vector<SolverTrace> traces;
    std::size_t total_prompt_tokens = 0;
};

/// Runs `options.n_votes` independent loops (in parallel up to the model's
/// concurrency) and votes. A deterministic model is run once and its answer
/// counted for every vote.
VoteResult solve_with_votes(ChatModel& lm, const Table& table, const SolverPrompt& prompt,
                            const SolverOptions& options = {});

/// One JSON object per step, newline-terminated.
std::string trace_to_jsonl(const SolverTrace& trace);

}  // namespace tablerag
