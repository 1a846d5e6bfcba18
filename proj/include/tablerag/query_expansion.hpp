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

#include "tablerag/lm.hpp"

namespace tablerag {

inline constexpr std::size_t kMaxExpandedQueries = 10;

struct QueryBundle {
    std::vector<std::string> schema_queries;
    std::vector<std::string> cell_queries;
    bool used_fallback = false;
};

struct ExpandedQueries {
    std::vector<std::string> queries;
    bool used_fallback = false;
};

/// First well-formed JSON array of strings in `reply`, elements trimmed and
/// blanks dropped. Throws ParseFailure when the reply holds no such array.
std::vector<std::string> parse_json_list(std::string_view reply);

std::string render_schema_expansion_prompt(std::string_view table_title, std::string_view question);
std::string render_cell_expansion_prompt(std::string_view table_title, std::string_view question);

/// Asks the LM for candidate column names. Unparseable or empty replies fall
/// back to the question itself. Results are de-duplicated and capped at 10.
ExpandedQueries expand_schema_queries(std::string_view question, std::string_view table_title, ChatModel& lm);
/// Same contract, for keywords expected to appear in table cells.
ExpandedQueries expand_cell_queries(std::string_view question, std::string_view table_title, ChatModel& lm);

QueryBundle expand_queries(std::string_view question, std::string_view table_title, ChatModel& lm);

}  // namespace tablerag
