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


#include "tablerag/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/interpreter.hpp"
#include "tablerag/text.hpp"

namespace tablerag {

namespace {

constexpr std::string_view kFinalMarker = "Final Answer:";

std::string json_string(std::string_view s) {
    return nlohmann::json(std::string(s)).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

// Python repr of a str, as a dataframe summary would print it.
std::string py_repr(std::string_view s) {
    char quote = (s.find('\'') != std::string_view::npos && s.find('"') == std::string_view::npos) ? '"' : '\'';
    std::string out(1, quote);
    for (char c : s) {
        if (c == '\\' || c == quote) out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back(quote);
    return out;
}

std::string numeric_literal(const std::string& raw, ColumnDType dtype) {
    if (dtype == ColumnDType::integer) {
        if (auto v = text::parse_int64(raw)) return std::to_string(*v);
    }
    if (auto v = text::parse_decimal(raw)) return text::format_number(*v);
    return json_string(raw);
}

std::string lines_or_none(const std::vector<std::string>& lines) {
    return lines.empty() ? "(none)" : text::join(lines, "\n");
}

}  // namespace

std::string schema_line(const ColumnSchema& schema) {
    std::string out = "{\"column_name\": " + json_string(schema.column_name) +
                      ", \"dtype\": " + json_string(dtype_frame_name(schema.dtype));
    if (schema.dtype == ColumnDType::categorical) {
        out += ", \"cell_examples\": [";
        for (std::size_t i = 0; i < schema.cell_examples.size(); ++i) {
            out += (i ? ", " : "") + py_repr(schema.cell_examples[i]);
        }
        out += "]";
    } else if (schema.min && schema.max) {
        if (schema.dtype == ColumnDType::datetime) {
            out += ", \"min\": " + json_string(*schema.min) + ", \"max\": " + json_string(*schema.max);
        } else {
            out += ", \"min\": " + numeric_literal(*schema.min, schema.dtype) +
                   ", \"max\": " + numeric_literal(*schema.max, schema.dtype);
        }
    }
    return out + "}";
}

std::string cell_line(const CellPair& cell) {
    return "{\"column_name\": " + json_string(cell.column_name) + ", \"cell_value\": " + json_string(cell.value) + "}";
}

std::string retrieval_context(std::span<const ColumnSchema> schema_hits, std::span<const CellPair> cell_hits,
                              std::span<const std::string> cell_queries) {
    std::vector<std::string> schema_lines;
    for (const auto& s : schema_hits) schema_lines.push_back(schema_line(s));
    std::vector<std::string> cell_lines;
    for (const auto& c : cell_hits) cell_lines.push_back(cell_line(c));

    std::string out =
        "Since you cannot view the table directly, here are some schemas and cell values retrieved from the table.\n\n";
    out += "Schema Retrieval Results:\n" + lines_or_none(schema_lines) + "\n\n";
    out += "Cell Retrieval Queries: " +
           text::join(std::vector<std::string>(cell_queries.begin(), cell_queries.end()), ", ") + "\n";
    out += "Cell Retrieval Results:\n" + lines_or_none(cell_lines);
    return out;
}

SolverPrompt render_solver_prompt(std::string_view title, std::string_view question, std::string_view table_context,
                                  SolverTool tool) {
    SolverPrompt p;
    p.text = render_template(solver_template(tool), {{"table_title", std::string(title)},
                                                     {"question", std::string(question)},
                                                     {"table_context", std::string(table_context)}});
    p.token_count = count_tokens(p.text);
    return p;
}

SolverPrompt assemble_prompt(std::string_view title, std::string_view question,
                             std::span<const ColumnSchema> schema_hits, std::span<const CellPair> cell_hits,
                             std::span<const std::string> cell_queries, SolverTool tool) {
    auto p = render_solver_prompt(title, question, retrieval_context(schema_hits, cell_hits, cell_queries), tool);
    p.included_schema_hits = schema_hits.size();
    p.included_cell_hits = cell_hits.size();
    for (const auto& s : schema_hits) p.columns_shown.push_back(s.column_name);
    for (const auto& c : cell_hits) p.cells_shown.emplace_back(c.column_name, c.value);
    return p;
}

Answer Answer::failure(std::string reason) {
    Answer a;
    a.failed = true;
    a.reason = std::move(reason);
    return a;
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// A comma between a digit and exactly three digits is a thousands separator.
bool thousands_comma(std::string_view s, std::size_t i) {
    if (i == 0 || !is_digit(s[i - 1])) return false;
    for (std::size_t k = 1; k <= 3; ++k) {
        if (i + k >= s.size() || !is_digit(s[i + k])) return false;
    }
    return i + 4 >= s.size() || !is_digit(s[i + 4]);
}

std::vector<std::string> split_answer(std::string_view s) {
    std::vector<std::string> parts;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted && !thousands_comma(s, i)) {
            parts.push_back(std::move(current));
            current.clear();
            continue;
        }
        current.push_back(c);
    }
    parts.push_back(std::move(current));

    std::vector<std::string> out;
    for (auto& p : parts) {
        auto t = text::trim(p);
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = text::trim(t.substr(1, t.size() - 2));
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::optional<double> answer_number(const std::string& normalized) { return text::parse_decimal(normalized); }

bool parts_match(const std::string& a, const std::string& b) {
    if (a == b) return true;
    auto x = answer_number(a);
    auto y = answer_number(b);
    if (!x || !y) return false;
    double scale = std::max(std::fabs(*x), std::fabs(*y));
    return std::fabs(*x - *y) <= 1e-6 * scale;
}

}  // namespace

Answer extract_final_answer(std::string_view reply) {
    auto pos = reply.rfind(kFinalMarker);
    if (pos == std::string_view::npos) throw NoFinalAnswer("reply has no \"Final Answer:\" line");
    auto rest = reply.substr(pos + kFinalMarker.size());
    auto line = text::trim(rest.substr(0, rest.find('\n')));
    Answer a;
    a.raw = std::string(line);
    a.parts = split_answer(line);
    if (a.parts.empty()) throw NoFinalAnswer("empty final answer");
    for (const auto& p : a.parts) a.normalized.push_back(normalize_answer_part(p));
    return a;
}

std::string normalize_answer_part(std::string_view part) {
    auto lowered = text::to_lower(text::trim(part));
    std::string out;
    for (std::size_t i = 0; i < lowered.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(lowered[i]);
        if (c == '$') continue;
        if (lowered.compare(i, 3, "\xE2\x82\xAC") == 0) {  // euro
            i += 2;
            continue;
        }
        if (lowered.compare(i, 2, "\xC2\xA3") == 0 || lowered.compare(i, 2, "\xC2\xA5") == 0) {  // pound, yen
            ++i;
            continue;
        }
        if (c == ',' && thousands_comma(lowered, i)) continue;
        out.push_back(lowered[i]);
    }
    return std::string(text::trim(out));
}

bool normalize_and_match(const Answer& pred, std::span<const std::string> gold) {
    if (pred.failed || pred.normalized.size() != gold.size()) return false;
    std::vector<std::string> g;
    for (const auto& x : gold) g.push_back(normalize_answer_part(x));
    const auto& p = pred.normalized;
    const std::size_t n = p.size();

    // Bipartite matching by augmenting paths; tolerance makes greedy unsafe.
    std::vector<int> owner(n, -1);
    std::vector<char> seen;
    std::function<bool(std::size_t)> augment = [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (seen[j] || !parts_match(p[i], g[j])) continue;
            seen[j] = 1;
            if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]))) {
                owner[j] = static_cast<int>(i);
                return true;
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
        seen.assign(n, 0);
        if (!augment(i)) return false;
    }
    return true;
}

Answer majority_vote(std::span<const Answer> answers) {
    std::map<std::vector<std::string>, std::pair<std::size_t, std::size_t>> tally;  // key -> (count, first)
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i].failed) continue;
        auto key = answers[i].normalized;
        std::sort(key.begin(), key.end());
        auto [it, inserted] = tally.try_emplace(key, 0, i);
        ++it->second.first;
    }
    if (tally.empty()) return Answer::failure(answers.empty() ? "no answers" : "all runs failed");
    std::size_t best_count = 0;
    std::size_t best_first = 0;
    for (const auto& [key, v] : tally) {
        if (v.first > best_count || (v.first == best_count && v.second < best_first)) {
            best_count = v.first;
            best_first = v.second;
        }
    }
    return answers[best_first];
}

namespace {

struct ParsedReply {
    std::string thought;
    std::optional<std::string> action;
};

ParsedReply parse_reply(std::string_view reply) {
    ParsedReply out;
    auto action_pos = reply.find("Action:");
    auto final_pos = reply.find(kFinalMarker);
    auto thought_end = std::min(action_pos, final_pos);
    auto head = reply.substr(0, thought_end == std::string_view::npos ? reply.size() : thought_end);
    auto tpos = head.find("Thought:");
    out.thought = std::string(text::trim(tpos == std::string_view::npos ? head : head.substr(tpos + 8)));
    if (action_pos != std::string_view::npos) {
        auto rest = reply.substr(action_pos + 7);
        auto line = text::trim(rest.substr(0, rest.find('\n')));
        if (line.size() >= 2 && line.front() == '`' && line.back() == '`') line = text::trim(line.substr(1, line.size() - 2));
        out.action = std::string(line);
    }
    return out;
}

std::string trim_right(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\r' || s.back() == '\t')) s.pop_back();
    return s;
}

}  // namespace

SolverTrace react_loop(ChatModel& lm, const Table& table, const SolverPrompt& prompt, const SolverOptions& options) {
    if (options.max_steps < 1) throw InvalidTarget("max_steps must be at least 1");
    ChatParams params;
    params.temperature = options.temperature;
    params.max_output_tokens = options.max_output_tokens;
    params.stop_sequences = {"Observation:"};

    TableEnv env(table);
    SolverTrace trace;
    std::string transcript;
    for (std::size_t step = 0; step < options.max_steps; ++step) {
        std::string full = prompt.text + transcript;
        trace.total_prompt_tokens += count_tokens(full);
        auto reply = trim_right(lm.complete(full, params));

        ReActStep s;
        s.reply = reply;
        auto parsed = parse_reply(reply);
        s.thought = parsed.thought;
        if (reply.find(kFinalMarker) != std::string::npos) {
            s.final = true;
            try {
                trace.answer = extract_final_answer(reply);
            } catch (const NoFinalAnswer& e) {
                trace.answer = Answer::failure(e.what());
            }
            trace.steps.push_back(std::move(s));
            return trace;
        }
        if (parsed.action && !parsed.action->empty()) {
            s.action = *parsed.action;
            s.observation = env.execute(s.action);
        } else {
            s.observation = "Error: no Action line; reply with an Action or a Final Answer";
        }
        transcript += reply + "\nObservation: " + s.observation + "\n";
        trace.steps.push_back(std::move(s));
    }
    trace.steps.back().exhausted = true;
    trace.answer = Answer::failure("step limit exceeded");
    return trace;
}

VoteResult solve_with_votes(ChatModel& lm, const Table& table, const SolverPrompt& prompt,
                            const SolverOptions& options) {
    const std::size_t runs = lm.deterministic() ? 1 : std::max<std::size_t>(options.n_votes, 1);
    std::vector<SolverTrace> traces(runs);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < runs; i = next++) {
            try {
                traces[i] = react_loop(lm, table, prompt, options);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = runs;
            }
        }
    };
    const std::size_t n_threads = std::min(runs, std::max<std::size_t>(lm.max_concurrency(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    VoteResult result;
    std::vector<Answer> answers;
    for (const auto& t : traces) {
        answers.push_back(t.answer);
        result.total_prompt_tokens += t.total_prompt_tokens;
    }
    if (lm.deterministic()) answers.assign(std::max<std::size_t>(options.n_votes, 1), answers.front());
    result.answer = majority_vote(answers);
    result.traces = std::move(traces);
    return result;
}

std::string trace_to_jsonl(const SolverTrace& trace) {
    std::string out;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& s = trace.steps[i];
        nlohmann::ordered_json j;
        j["step"] = i + 1;
        j["thought"] = s.thought;
        if (s.final) {
            j["final"] = true;
            if (trace.answer.failed) {
                j["failure"] = trace.answer.reason;
            } else {
                j["final_answer"] = trace.answer.parts;
            }
        } else {
            j["action"] = s.action;
            j["observation"] = s.observation;
        }
        if (s.exhausted) j["failure"] = trace.answer.reason;
        out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

}  // namespace tablerag
