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


#include "tablerag/evaluation.hpp"

#include <atomic>
#include <cstdio>
#include <map>
#include <thread>

#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/pipeline.hpp"

namespace tablerag {

RetrievalScores retrieval_metrics(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
    if (gold.empty()) throw EmptyGold("retrieval metrics need a non-empty gold set");
    std::size_t hit = 0;
    for (const auto& p : predicted) hit += gold.count(p);
    RetrievalScores s;
    s.recall = static_cast<double>(hit) / static_cast<double>(gold.size());
    s.precision = predicted.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(predicted.size());
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

std::string_view method_name(Method method) {
    switch (method) {
        case Method::tablerag: return "tablerag";
        case Method::read_table: return "read_table";
        case Method::read_schema: return "read_schema";
        case Method::rand_row: return "rand_row";
        case Method::rowcol: return "rowcol";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (auto m : {Method::tablerag, Method::read_table, Method::read_schema, Method::rand_row, Method::rowcol}) {
        if (method_name(m) == name) return m;
    }
    throw FormatError("unknown method '" + std::string(name) +
                      "' (expected tablerag, read_table, read_schema, rand_row or rowcol)");
}

namespace {

// Meters the prompt tokens one instance sends to the shared model.
class CountingChatModel final : public ChatModel {
public:
    explicit CountingChatModel(ChatModel& inner) : inner_(inner) {}

    std::string complete(std::string_view prompt, const ChatParams& params) override {
        tokens_ += count_tokens(prompt);
        return inner_.complete(prompt, params);
    }
    bool deterministic() const override { return inner_.deterministic(); }
    std::size_t max_concurrency() const override { return inner_.max_concurrency(); }

    std::size_t tokens() const { return tokens_.load(); }

private:
    ChatModel& inner_;
    std::atomic<std::size_t> tokens_{0};
};

struct PreparedTable {
    std::optional<Table> table;
    std::string title;
    std::optional<TableIndexes> indexes;
    std::optional<RowColIndex> rowcol;
    std::size_t build_tokens = 0;
    std::string error;  // set when indexing failed
};

std::string cell_key(const std::string& column, std::string_view value) {
    return column + '\x1f' + normalize_answer_part(value);
}

void score_retrieval(InstanceRecord& rec, const QAInstance& inst, const SolverPrompt& prompt) {
    if (inst.gold_columns && !inst.gold_columns->empty()) {
        std::set<std::string> pred(prompt.columns_shown.begin(), prompt.columns_shown.end());
        std::set<std::string> gold(inst.gold_columns->begin(), inst.gold_columns->end());
        rec.column_scores = retrieval_metrics(pred, gold);
    }
    if (inst.gold_cells && !inst.gold_cells->empty()) {
        std::set<std::string> pred, gold;
        for (const auto& [c, v] : prompt.cells_shown) pred.insert(cell_key(c, v));
        for (const auto& [c, v] : *inst.gold_cells) gold.insert(cell_key(c, v));
        rec.cell_scores = retrieval_metrics(pred, gold);
    }
}

void run_instance(InstanceRecord& rec, const QAInstance& inst, const PreparedTable& prep, Method method,
                  const BenchmarkConfig& config, ChatModel& lm, const std::shared_ptr<const Encoder>& encoder) {
    if (!prep.error.empty()) {
        rec.failed = true;
        rec.failure = prep.error;
        return;
    }
    const Table& table = *prep.table;
    CountingChatModel counted_lm(lm);
    CountingEncoder counted_enc(encoder);
    try {
        std::optional<SolverPrompt> prompt;
        switch (method) {
            case Method::tablerag:
                prompt = prepare_tablerag_prompt(prep.title, inst.question, *prep.indexes, counted_lm, counted_enc,
                                                 config.retrieval, config.tool)
                             .prompt;
                break;
            case Method::read_table:
                prompt = read_table_prompt(table, inst.question, config.context_limit_tokens, config.tool);
                break;
            case Method::read_schema: prompt = read_schema_prompt(table, inst.question, config.tool); break;
            case Method::rand_row:
                prompt = sub_table_prompt(rand_row_sample(table, config.baseline_k, config.seed + rec.index),
                                          inst.question, config.tool);
                break;
            case Method::rowcol: {
                auto q = counted_enc.embed(inst.question);
                auto sel = rowcol_select(*prep.rowcol, q, config.baseline_k);
                prompt = sub_table_prompt(table.select(sel.rows, sel.cols), inst.question, config.tool);
                break;
            }
        }
        if (!prompt) {
            rec.failed = true;
            rec.failure = "table exceeds the context limit";
        } else {
            rec.prompt_tokens = prompt->token_count;
            score_retrieval(rec, inst, *prompt);
            auto vote = solve_with_votes(counted_lm, table, *prompt, config.solver);
            rec.answer = vote.answer;
            rec.failed = vote.answer.failed;
            rec.failure = vote.answer.reason;
            rec.matched = normalize_and_match(vote.answer, inst.gold_answer);
        }
    } catch (const RemoteError& e) {
        rec.failed = true;
        rec.lm_error = true;
        rec.failure = e.what();
    } catch (const ScriptExhausted& e) {
        rec.failed = true;
        rec.lm_error = true;
        rec.failure = e.what();
    } catch (const Error& e) {
        rec.failed = true;
        rec.failure = e.what();
    }
    if (rec.failed) rec.matched = false;
    rec.lm_tokens = counted_lm.tokens();
    rec.encoder_tokens += counted_enc.tokens();
}

std::optional<RetrievalScores> mean_scores(const std::vector<InstanceRecord>& recs,
                                           std::optional<RetrievalScores> InstanceRecord::*field) {
    RetrievalScores sum;
    std::size_t n = 0;
    for (const auto& r : recs) {
        if (const auto& s = r.*field) {
            sum.recall += s->recall;
            sum.precision += s->precision;
            sum.f1 += s->f1;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    double d = static_cast<double>(n);
    return RetrievalScores{sum.recall / d, sum.precision / d, sum.f1 / d};
}

nlohmann::ordered_json scores_json(const std::optional<RetrievalScores>& s) {
    if (!s) return nullptr;
    return {{"recall", s->recall}, {"precision", s->precision}, {"f1", s->f1}};
}

}  // namespace

MethodReport run_benchmark(const DatasetManifest& manifest, Method method, const BenchmarkConfig& config,
                           ChatModel& lm, std::shared_ptr<const Encoder> encoder) {
    std::map<std::string, PreparedTable> tables;
    for (const auto& mt : manifest.tables) {
        PreparedTable prep;
        prep.title = mt.title;
        prep.table = load_table_csv(mt.csv_path, mt.title);
        CountingEncoder counted(encoder);
        try {
            if (method == Method::tablerag) prep.indexes = build_indexes(*prep.table, config.budget, counted);
            if (method == Method::rowcol) prep.rowcol = build_rowcol_index(*prep.table, config.budget.value, counted);
        } catch (const Error& e) {
            prep.error = std::string("indexing table '") + mt.table_id + "' failed: " + e.what();
        }
        prep.build_tokens = counted.tokens();
        tables.emplace(mt.table_id, std::move(prep));
    }

    MethodReport report;
    report.method = std::string(method_name(method));
    report.dataset = manifest.name;
    report.instances.resize(manifest.instances.size());
    std::map<std::string, bool> charged;
    for (std::size_t i = 0; i < manifest.instances.size(); ++i) {
        const auto& inst = manifest.instances[i];
        auto& rec = report.instances[i];
        rec.index = i;
        rec.question = inst.question;
        rec.table_id = inst.table_id;
        rec.gold_answer = inst.gold_answer;
        if (!charged[inst.table_id]) {
            rec.encoder_tokens = tables.at(inst.table_id).build_tokens;
            charged[inst.table_id] = true;
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < manifest.instances.size(); i = next++) {
            const auto& inst = manifest.instances[i];
            run_instance(report.instances[i], inst, tables.at(inst.table_id), method, config, lm, encoder);
        }
    };
    const std::size_t n_threads =
        lm.deterministic() ? 1 : std::min(manifest.instances.size(), std::max<std::size_t>(lm.max_concurrency(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::size_t prompted = 0, prompt_sum = 0;
    for (const auto& r : report.instances) {
        ++report.n_instances;
        report.n_matched += r.matched ? 1 : 0;
        report.n_failed += r.failed ? 1 : 0;
        report.total_lm_tokens += r.lm_tokens;
        report.total_encoder_tokens += r.encoder_tokens;
        if (r.prompt_tokens > 0) {
            ++prompted;
            prompt_sum += r.prompt_tokens;
        }
    }
    if (report.n_instances > 0) {
        report.accuracy = static_cast<double>(report.n_matched) / static_cast<double>(report.n_instances);
    }
    if (prompted > 0) report.mean_prompt_tokens = static_cast<double>(prompt_sum) / static_cast<double>(prompted);
    report.column_metrics = mean_scores(report.instances, &InstanceRecord::column_scores);
    report.cell_metrics = mean_scores(report.instances, &InstanceRecord::cell_scores);
    return report;
}

std::string report_to_json(const MethodReport& report) {
    nlohmann::ordered_json j;
    j["method"] = report.method;
    j["dataset"] = report.dataset;
    j["n_instances"] = report.n_instances;
    j["n_matched"] = report.n_matched;
    j["n_failed"] = report.n_failed;
    j["accuracy"] = report.accuracy;
    j["mean_prompt_tokens"] = report.mean_prompt_tokens;
    j["total_lm_tokens"] = report.total_lm_tokens;
    j["total_encoder_tokens"] = report.total_encoder_tokens;
    j["column_retrieval"] = scores_json(report.column_metrics);
    j["cell_retrieval"] = scores_json(report.cell_metrics);
    j["answer_normalization"] =
        "lower-case, trim, strip currency symbols and thousands separators; numbers match at relative tolerance 1e-6";
    auto& arr = j["instances"] = nlohmann::ordered_json::array();
    for (const auto& r : report.instances) {
        nlohmann::ordered_json e;
        e["index"] = r.index;
        e["table_id"] = r.table_id;
        e["question"] = r.question;
        e["gold_answer"] = r.gold_answer;
        e["answer"] = r.answer.failed ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.answer.parts);
        e["matched"] = r.matched;
        e["failed"] = r.failed;
        if (r.failed) e["failure"] = r.failure;
        e["prompt_tokens"] = r.prompt_tokens;
        e["lm_tokens"] = r.lm_tokens;
        e["encoder_tokens"] = r.encoder_tokens;
        if (r.column_scores) e["column_retrieval"] = scores_json(r.column_scores);
        if (r.cell_scores) e["cell_retrieval"] = scores_json(r.cell_scores);
        arr.push_back(std::move(e));
    }
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string report_summary_csv(const MethodReport& report) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    auto triple = [&](const std::optional<RetrievalScores>& s) {
        return s ? num(s->recall) + "," + num(s->precision) + "," + num(s->f1) : std::string(",,");
    };
    std::string out =
        "method,dataset,accuracy,mean_prompt_tokens,encoder_tokens,column_recall,column_precision,column_f1,"
        "cell_recall,cell_precision,cell_f1\n";
    auto dataset = report.dataset;
    if (dataset.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c : dataset) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        dataset = q + "\"";
    }
    out += report.method + "," + dataset + "," + num(report.accuracy) + "," + num(report.mean_prompt_tokens) + "," +
           std::to_string(report.total_encoder_tokens) + "," + triple(report.column_metrics) + "," +
           triple(report.cell_metrics) + "\n";
    return out;
}

}  // namespace tablerag
