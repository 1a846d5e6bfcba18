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

#include <map>
#include <string>
#include <string_view>

namespace tablerag {

namespace assets {
// Compiled from assets/prompts/*.txt.
extern const std::string_view schema_expansion_v1;
extern const std::string_view cell_expansion_v1;
extern const std::string_view solver_pandas_v1;
extern const std::string_view solver_table_expr_v1;
}  // namespace assets

/// Which action language the solver prompt advertises. `table_expr` is the
/// interpreter this library executes; `pandas_shell` renders the original
/// dataframe-shell wording for use with an external executor.
enum class SolverTool { table_expr, pandas_shell };

std::string_view solver_template(SolverTool tool);
std::string_view solver_tool_name(SolverTool tool);
SolverTool parse_solver_tool(std::string_view name);

/// Replaces each "{slot}" whose name is a key of `slots`, in a single pass:
/// substituted text is never rescanned. Unknown braces are left alone.
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& slots);

}  // namespace tablerag
