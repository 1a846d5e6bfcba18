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
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tablerag/baselines.hpp"
#include "tablerag/corpus.hpp"
#include "tablerag/ingestion.hpp"
#include "tablerag/retrieval.hpp"
#include "tablerag/solver.hpp"

namespace tablerag {

struct RetrievalScores {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

/// Set recall/precision/F1. An empty prediction has precision 0; F1 is 0
/// when precision + recall is 0. Throws EmptyGold when `gold` is empty.
RetrievalScores retrieval_metrics(const std::set<std::string>& predicted, const std::set<std::string>& gold);

enum class Method { tablerag, read_table, read_schema, rand_row, rowcol };

std::string_view method_name(Method method);
/// Throws FormatError on an unknown name.
Method parse_method(std::string_view name);

struct BenchmarkConfig {
    RetrievalConfig retrieval;
    EncodingBudget budget{10000};
    std::size_t baseline_k = 30;
    SolverOptions solver;
    std::size_t context_limit_tokens = kDefaultContextLimit;
    std::uint64_t seed = 0;
    SolverTool tool = SolverTool::table_expr;
};

struct InstanceRecord {
    std::size_t index = 0;
    std::string question;
    std::string table_id;
    std::vector<std::string> gold_answer;
    Answer answer;
    bool matched = false;
    bool failed = false;
    bool lm_error = false;  // RemoteError or ScriptExhausted
    std::string failure;
    std::size_t prompt_tokens = 0;  // solver prompt P(T)
    std::size_t lm_tokens = 0;      // every prompt token sent to the LM
    std::size_t encoder_tokens = 0;
    std::optional<RetrievalScores> column_scores;
    std::optional<RetrievalScores> cell_scores;
};

struct MethodReport {
    std::string method;
    std::string dataset;
    std::size_t n_instances = 0;
    std::size_t n_matched = 0;
    std::size_t n_failed = 0;
    double accuracy = 0.0;
    double mean_prompt_tokens = 0.0;
    std::size_t total_lm_tokens = 0;
    std::size_t total_encoder_tokens = 0;
    // Averaged over instances that carry gold annotations.
    std::optional<RetrievalScores> column_metrics;
    std::optional<RetrievalScores> cell_metrics;
    std::vector<InstanceRecord> instances;
};

/// Evaluates every manifest instance with one method. Tables are loaded and
/// indexed once, in manifest order; instances then run in parallel up to
/// the LM's concurrency (in order when the LM is deterministic). An instance
/// that fails, including on LM errors, is recorded and the run continues.
MethodReport run_benchmark(const DatasetManifest& manifest, Method method, const BenchmarkConfig& config,
                           ChatModel& lm, std::shared_ptr<const Encoder> encoder);

std::string report_to_json(const MethodReport& report);
/// Header plus one summary row.
std::string report_summary_csv(const MethodReport& report);

}  // namespace tablerag
