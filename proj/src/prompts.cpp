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


#include "tablerag/prompts.hpp"

#include "tablerag/errors.hpp"

namespace tablerag {

std::string_view solver_template(SolverTool tool) {
    return tool == SolverTool::pandas_shell ? assets::solver_pandas_v1 : assets::solver_table_expr_v1;
}

std::string_view solver_tool_name(SolverTool tool) {
    return tool == SolverTool::pandas_shell ? "pandas" : "table_expr";
}

SolverTool parse_solver_tool(std::string_view name) {
    if (name == "table_expr") return SolverTool::table_expr;
    if (name == "pandas") return SolverTool::pandas_shell;
    throw FormatError("unknown solver tool '" + std::string(name) + "' (expected table_expr or pandas)");
}

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            auto close = tpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = slots.find(std::string(tpl.substr(i + 1, close - i - 1)));
                if (it != slots.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i++]);
    }
    return out;
}

}  // namespace tablerag
