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


#include "tablerag/query_expansion.hpp"

#include <unordered_set>

#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/prompts.hpp"
#include "tablerag/text.hpp"

namespace tablerag {

namespace {

std::optional<std::vector<std::string>> as_string_array(std::string_view candidate) {
    auto doc = nlohmann::json::parse(candidate, nullptr, /*allow_exceptions=*/false);
    if (!doc.is_array()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& e : doc) {
        if (!e.is_string()) return std::nullopt;
        auto t = text::trim(e.get_ref<const std::string&>());
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

ExpandedQueries finish(std::string_view question, std::string_view reply) {
    std::vector<std::string> parsed;
    try {
        parsed = parse_json_list(reply);
    } catch (const ParseFailure&) {
        parsed.clear();
    }
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto& q : parsed) {
        if (out.size() == kMaxExpandedQueries) break;
        if (seen.insert(q).second) out.push_back(std::move(q));
    }
    if (out.empty()) return {{std::string(question)}, true};
    return {std::move(out), false};
}

ChatParams expansion_params() {
    ChatParams params;
    params.temperature = 0.0;
    params.max_output_tokens = 256;
    return params;
}

}  // namespace

std::vector<std::string> parse_json_list(std::string_view reply) {
    // Try every '[' ... ']' span, shortest first for each start.
    for (auto open = reply.find('['); open != std::string_view::npos; open = reply.find('[', open + 1)) {
        for (auto close = reply.find(']', open); close != std::string_view::npos; close = reply.find(']', close + 1)) {
            if (auto list = as_string_array(reply.substr(open, close - open + 1))) return *list;
        }
    }
    throw ParseFailure("no JSON array of strings in reply");
}

std::string render_schema_expansion_prompt(std::string_view table_title, std::string_view question) {
    return render_template(assets::schema_expansion_v1,
                           {{"table_title", std::string(table_title)}, {"question", std::string(question)}});
}

std::string render_cell_expansion_prompt(std::string_view table_title, std::string_view question) {
    return render_template(assets::cell_expansion_v1,
                           {{"table_title", std::string(table_title)}, {"question", std::string(question)}});
}

ExpandedQueries expand_schema_queries(std::string_view question, std::string_view table_title, ChatModel& lm) {
    auto reply = lm.complete(render_schema_expansion_prompt(table_title, question), expansion_params());
    return finish(question, reply);
}

ExpandedQueries expand_cell_queries(std::string_view question, std::string_view table_title, ChatModel& lm) {
    auto reply = lm.complete(render_cell_expansion_prompt(table_title, question), expansion_params());
    return finish(question, reply);
}

QueryBundle expand_queries(std::string_view question, std::string_view table_title, ChatModel& lm) {
    auto schema = expand_schema_queries(question, table_title, lm);
    auto cells = expand_cell_queries(question, table_title, lm);
    return {std::move(schema.queries), std::move(cells.queries), schema.used_fallback || cells.used_fallback};
}

}  // namespace tablerag
