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


#include "tablerag/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tablerag/baselines.hpp"
#include "tablerag/corpus.hpp"
#include "tablerag/errors.hpp"
#include "tablerag/evaluation.hpp"
#include "tablerag/ingestion.hpp"
#include "tablerag/pipeline.hpp"
#include "tablerag/synthetic.hpp"
#include "tablerag/text.hpp"

namespace fs = std::filesystem;

namespace tablerag {

namespace {

constexpr std::size_t kMockEncoderDim = 256;

struct BuildArgs {
    std::string table;
    std::string title;
    std::string out;
};

struct AskArgs {
    std::string index;
    std::string question;
};

struct EvalArgs {
    std::string manifest;
    std::string method;
    std::string out;
};

struct ExpandArgs {
    std::string table;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string out;
    std::string map;
};

std::shared_ptr<const Encoder> make_encoder(const RunConfig& cfg) {
    if (cfg.mock_encoder) return std::make_shared<HashingEncoder>(kMockEncoderDim, 0);
    if (cfg.encoder.base_url.empty()) {
        throw FormatError("no encoder configured: pass --mock-encoder or --encoder-base-url");
    }
    return std::make_shared<RemoteEncoder>(cfg.encoder);
}

std::unique_ptr<ChatModel> make_chat_model(const RunConfig& cfg) {
    if (!cfg.mock_lm.empty()) return ScriptedChatModel::from_file(cfg.mock_lm);
    if (cfg.lm.base_url.empty()) throw FormatError("no LM configured: pass --mock-lm or --lm-base-url");
    return std::make_unique<RemoteChatModel>(cfg.lm);
}

SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions o;
    o.max_steps = cfg.max_steps;
    o.temperature = cfg.temperature;
    o.n_votes = cfg.n_votes;
    return o;
}

RetrievalConfig retrieval_config(const RunConfig& cfg) { return {cfg.k, cfg.mode, cfg.hybrid_weight}; }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

nlohmann::ordered_json stats_json(const CorpusStats& s, std::size_t cell_entries) {
    return {{"n_rows", s.n_rows},
            {"n_cols", s.n_cols},
            {"n_cells", s.n_cells},
            {"n_distinct", s.n_distinct},
            {"n_categorical_cols", s.n_categorical_cols},
            {"n_cell_entries", cell_entries}};
}

int cmd_build(const BuildArgs& a, const RunConfig& cfg, std::ostream& out) {
    fs::path csv(a.table);
    auto title = a.title.empty() ? csv.stem().string() : a.title;
    auto table = load_table_csv(csv, title);
    auto encoder = make_encoder(cfg);
    auto idx = build_indexes(table, EncodingBudget(cfg.budget), *encoder);

    fs::path dir(a.out);
    ensure_dir(dir);
    save_index(idx.schema, dir / "schema.idx");
    save_index(idx.cells, dir / "cells.idx");
    save_table_csv(table, dir / "table.csv");
    write_file(dir / "stats.json", stats_json(idx.stats, idx.cells.size()).dump(2) + "\n");
    nlohmann::ordered_json meta = {
        {"title", title}, {"encoder", encoder->name()}, {"dim", encoder->dim()}, {"budget", cfg.budget}};
    write_file(dir / "meta.json", meta.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");

    out << "built " << dir.string() << ": " << idx.schema.size() << " columns, " << idx.cells.size() << " of "
        << idx.stats.n_distinct << " distinct cells indexed\n";
    return kExitOk;
}

int cmd_ask(const AskArgs& a, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    fs::path dir(a.index);
    if (!fs::is_directory(dir)) throw IoError("index directory not found: " + dir.string());
    auto meta = nlohmann::json::parse(read_file(dir / "meta.json"), nullptr, false);
    if (!meta.is_object() || !meta.contains("title") || !meta["title"].is_string()) {
        throw FormatError("bad meta.json in " + dir.string());
    }
    std::string title = meta["title"];
    auto encoder = make_encoder(cfg);
    if (meta.value("encoder", std::string()) != encoder->name()) {
        throw FormatError("index was built with encoder '" + meta.value("encoder", std::string()) +
                          "' but the configured encoder is '" + encoder->name() + "'");
    }
    TableIndexes idx{load_schema_index(dir / "schema.idx", encoder->dim()),
                     load_cell_index(dir / "cells.idx", encoder->dim()), {}};
    auto table = load_table_csv(dir / "table.csv", title);
    idx.stats = table_stats(table);

    auto lm = make_chat_model(cfg);
    auto prep = prepare_tablerag_prompt(title, a.question, idx, *lm, *encoder, retrieval_config(cfg));
    auto result = solve_with_votes(*lm, table, prep.prompt, solver_options(cfg));

    if (cfg.trace) {
        for (const auto& t : result.traces) out << trace_to_jsonl(t);
    }
    if (result.answer.failed) {
        err << "no answer: " << result.answer.reason << "\n";
        return kExitSolveFailed;
    }
    out << "Final Answer: " << text::join(result.answer.parts, ", ") << "\n";
    return kExitOk;
}

int cmd_eval(const EvalArgs& a, const RunConfig& cfg, std::ostream& out) {
    auto manifest = load_manifest(a.manifest);
    auto method = parse_method(a.method);
    auto encoder = make_encoder(cfg);
    auto lm = make_chat_model(cfg);

    BenchmarkConfig bc;
    bc.retrieval = retrieval_config(cfg);
    bc.budget = EncodingBudget(cfg.budget);
    bc.baseline_k = cfg.baseline_k;
    bc.solver = solver_options(cfg);
    bc.context_limit_tokens = cfg.context_limit_tokens;
    bc.seed = cfg.seed;
    auto report = run_benchmark(manifest, method, bc, *lm, encoder);

    fs::path json_path(a.out);
    if (json_path.has_parent_path()) ensure_dir(json_path.parent_path());
    write_file(json_path, report_to_json(report));
    auto csv_path = json_path;
    csv_path.replace_extension(".csv");
    write_file(csv_path, report_summary_csv(report));

    char acc[32];
    std::snprintf(acc, sizeof acc, "%.4f", report.accuracy);
    out << report.method << " on " << report.dataset << ": accuracy " << acc << " (" << report.n_matched << "/"
        << report.n_instances << "), " << report.n_failed << " failed\n";
    bool lm_failures = std::any_of(report.instances.begin(), report.instances.end(),
                                   [](const InstanceRecord& r) { return r.lm_error; });
    return lm_failures ? kExitRemoteFailed : kExitOk;
}

int cmd_expand(const ExpandArgs& a, const RunConfig& cfg, std::ostream& out) {
    fs::path csv(a.table);
    auto table = load_table_csv(csv, csv.stem().string());
    auto expanded = expand_table_synthetic(table, a.rows, a.cols, cfg.seed);
    fs::path out_path(a.out);
    if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
    save_table_csv(expanded.table, out_path);
    fs::path map_path = a.map.empty() ? fs::path(out_path).replace_extension(".map.json") : fs::path(a.map);
    write_file(map_path, position_map_json(expanded.map));
    out << "expanded " << table.n_rows() << "x" << table.n_cols() << " to " << a.rows << "x" << a.cols << ": "
        << out_path.string() << "\n";
    return kExitOk;
}

int cmd_config(const RunConfig& cfg, std::ostream& out) {
    nlohmann::ordered_json j = {{"k", cfg.k},
                                {"budget", cfg.budget},
                                {"baseline_k", cfg.baseline_k},
                                {"votes", cfg.n_votes},
                                {"mode", retrieval_mode_name(cfg.mode)},
                                {"hybrid_weight", cfg.hybrid_weight},
                                {"max_steps", cfg.max_steps},
                                {"temperature", cfg.temperature},
                                {"context_limit", cfg.context_limit_tokens},
                                {"seed", cfg.seed},
                                {"mock_lm", cfg.mock_lm},
                                {"mock_encoder", cfg.mock_encoder},
                                {"lm_base_url", cfg.lm.base_url},
                                {"lm_model", cfg.lm.model_name},
                                {"encoder_base_url", cfg.encoder.base_url},
                                {"encoder_model", cfg.encoder.model_name}};
    out << j.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Retrieval-augmented question answering over large tables", "tablerag"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (TOML key = value, keys named like the long flags)");

    RunConfig cfg;
    std::string mode = "embed";
    app.add_option("--k", cfg.k, "Retrieval limit per query")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--budget", cfg.budget, "Cell encoding budget B")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--baseline-k", cfg.baseline_k, "Rows (and columns) kept by rand_row and rowcol")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--votes", cfg.n_votes, "Solver runs per question")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--mode", mode, "Retrieval scoring")->check(CLI::IsMember({"embed", "bm25", "hybrid"}))->capture_default_str();
    app.add_option("--hybrid-weight", cfg.hybrid_weight, "Dense weight in hybrid mode")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--max-steps", cfg.max_steps, "ReAct step limit")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--temperature", cfg.temperature, "Solver sampling temperature")
        ->check(CLI::Range(0.0, 2.0))
        ->capture_default_str();
    app.add_option("--context-limit", cfg.context_limit_tokens, "Prompt token limit for read_table")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for sampling and expansion")->capture_default_str();
    app.add_option("--mock-lm", cfg.mock_lm, "Playback script replacing the chat LM")->check(CLI::ExistingFile);
    app.add_flag("--mock-encoder", cfg.mock_encoder, "Offline hashing encoder");
    app.add_flag("--trace", cfg.trace, "Print the solver trace as JSON lines");

    app.add_option("--lm-base-url", cfg.lm.base_url, "Chat endpoint base URL");
    app.add_option("--lm-model", cfg.lm.model_name, "Chat model name");
    app.add_option("--lm-api-key-env", cfg.lm.api_key_env_var, "Env var holding the chat API key")->capture_default_str();
    app.add_option("--lm-concurrency", cfg.lm.max_concurrent_requests, "Max in-flight chat requests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--lm-timeout-ms", cfg.lm.timeout_ms, "Chat request timeout")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--lm-retries", cfg.lm.retry_count, "Chat retries")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--encoder-base-url", cfg.encoder.base_url, "Embedding endpoint base URL");
    app.add_option("--encoder-model", cfg.encoder.model_name, "Embedding model name");
    app.add_option("--encoder-api-key-env", cfg.encoder.api_key_env_var, "Env var holding the embedding API key")
        ->capture_default_str();
    app.add_option("--encoder-dim", cfg.encoder.embedding_dim, "Embedding dimension")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--encoder-concurrency", cfg.encoder.max_concurrent_requests, "Max in-flight embedding requests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--encoder-retries", cfg.encoder.retry_count, "Embedding retries")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "Index a CSV table");
    build_cmd->add_option("--table", build.table, "CSV file")->required()->check(CLI::ExistingFile);
    build_cmd->add_option("--title", build.title, "Table title (defaults to the file name)");
    build_cmd->add_option("--out", build.out, "Output directory")->required();

    AskArgs ask;
    auto* ask_cmd = app.add_subcommand("ask", "Answer a question against a built index");
    ask_cmd->add_option("--index", ask.index, "Directory written by build")->required();
    ask_cmd->add_option("--question", ask.question, "Question")->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Benchmark one method over a manifest");
    eval_cmd->add_option("--manifest", eval.manifest, "Dataset manifest JSON")->required();
    eval_cmd->add_option("--method", eval.method, "Prompting method")
        ->required()
        ->check(CLI::IsMember({"tablerag", "read_table", "read_schema", "rand_row", "rowcol"}));
    eval_cmd->add_option("--out", eval.out, "Report JSON path (a .csv summary is written next to it)")->required();

    ExpandArgs expand;
    auto* expand_cmd = app.add_subcommand("expand", "Grow a table with seeded filler rows and columns");
    expand_cmd->add_option("--table", expand.table, "CSV file")->required()->check(CLI::ExistingFile);
    expand_cmd->add_option("--rows", expand.rows, "Target rows")->required();
    expand_cmd->add_option("--cols", expand.cols, "Target columns")->required();
    expand_cmd->add_option("--out", expand.out, "Output CSV")->required();
    expand_cmd->add_option("--map", expand.map, "Position map JSON (default: <out>.map.json)");

    auto* config_cmd = app.add_subcommand("config", "Print the effective settings");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        if (e.get_name() != "CallForHelp") err << app.help();
        return kExitUsage;
    }

    try {
        cfg.mode = parse_retrieval_mode(mode);
        if (build_cmd->parsed()) return cmd_build(build, cfg, out);
        if (ask_cmd->parsed()) return cmd_ask(ask, cfg, out, err);
        if (eval_cmd->parsed()) return cmd_eval(eval, cfg, out);
        if (expand_cmd->parsed()) return cmd_expand(expand, cfg, out);
        if (config_cmd->parsed()) return cmd_config(cfg, out);
    } catch (const RemoteError& e) {
        err << "error: " << e.what() << "\n";
        return kExitRemoteFailed;
    } catch (const ScriptExhausted& e) {
        err << "error: " << e.what() << "\n";
        return kExitRemoteFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace tablerag
