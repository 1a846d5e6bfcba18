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


#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tablerag/errors.hpp"
#include "tablerag/prompts.hpp"
#include "tablerag/query_expansion.hpp"
#include "tablerag/solver.hpp"
#include "tablerag/ingestion.hpp"

using namespace tablerag;

namespace {

const char* kTitle = "amazon seller order status prediction orders data";
const char* kQuestion = "What is the average price for leather wallets?";

std::string golden(const std::string& name) { return read_file(oracle::fixture("golden/" + name)); }

}  // namespace

TEST(PromptsTest, RenderTemplateIsSinglePass) {
    EXPECT_EQ(render_template("{a} and {b} {unknown}", {{"a", "{b}"}, {"b", "x"}}), "{b} and x {unknown}");
    EXPECT_EQ(render_template("{a", {{"a", "x"}}), "{a");
    EXPECT_EQ(render_template("", {}), "");
}

TEST(PromptsTest, SchemaExpansionMatchesGolden) {
    EXPECT_EQ(render_schema_expansion_prompt(kTitle, kQuestion), golden("schema_expansion.txt"));
}

TEST(PromptsTest, CellExpansionMatchesGolden) {
    EXPECT_EQ(render_cell_expansion_prompt(kTitle, kQuestion), golden("cell_expansion.txt"));
}

TEST(PromptsTest, SolverPromptMatchesGolden) {
    std::vector<ColumnSchema> schema(3);
    schema[0].column_name = "item_total";
    schema[0].cell_examples = {"$449.00", "$399.00", "$549.00"};
    schema[1].column_name = "quantity";
    schema[1].dtype = ColumnDType::integer;
    schema[1].min = "1";
    schema[1].max = "4";
    schema[2].column_name = "order_no";
    schema[2].cell_examples = {"402-4845680-8041921", "405-9763961-5211537", "404-3964908-7850720"};
    std::vector<CellPair> cells = {
        {"order_status", "Delivered to buyer", 1},
        {"description",
         "Pure Leather Camel Color Gent's Wallet with Coin Compartment and Card Holders | Men's Ultra Slim Money "
         "Organiser (1 pc)",
         1}};
    std::vector<std::string> queries = {"leather wallets", "average price", "order status", "prediction",
                                        "amazon seller"};
    auto p = assemble_prompt(kTitle, kQuestion, schema, cells, queries, SolverTool::pandas_shell);
    EXPECT_EQ(p.text, golden("solver_pandas.txt"));
    EXPECT_EQ(p.token_count, count_tokens(p.text));
    EXPECT_EQ(p.included_schema_hits, 3u);
    EXPECT_EQ(p.included_cell_hits, 2u);
    EXPECT_EQ(p.columns_shown, (std::vector<std::string>{"item_total", "quantity", "order_no"}));
}

TEST(PromptsTest, SchemaAndCellLines) {
    ColumnSchema q;
    q.column_name = "quantity";
    q.dtype = ColumnDType::integer;
    q.min = "1";
    q.max = "4";
    EXPECT_EQ(schema_line(q), R"({"column_name": "quantity", "dtype": "int64", "min": 1, "max": 4})");

    ColumnSchema d;
    d.column_name = "when";
    d.dtype = ColumnDType::datetime;
    d.min = "2020-01-01";
    d.max = "2020-02-01";
    EXPECT_EQ(schema_line(d),
              R"({"column_name": "when", "dtype": "datetime64[ns]", "min": "2020-01-01", "max": "2020-02-01"})");

    ColumnSchema c;
    c.column_name = "name";
    c.cell_examples = {"O'Brien", "plain"};
    EXPECT_EQ(schema_line(c), R"({"column_name": "name", "dtype": "object", "cell_examples": ["O'Brien", 'plain']})");

    EXPECT_EQ(cell_line({"order_status", "Delivered to buyer", 3}),
              R"({"column_name": "order_status", "cell_value": "Delivered to buyer"})");
    EXPECT_EQ(cell_line({"c", "say \"hi\"", 1}), R"({"column_name": "c", "cell_value": "say \"hi\""})");
}

TEST(PromptsTest, EmptyRetrievalRendersNone) {
    std::vector<std::string> queries = {"x"};
    auto ctx = retrieval_context({}, {}, queries);
    EXPECT_NE(ctx.find("Schema Retrieval Results:\n(none)\n"), std::string::npos) << ctx;
    EXPECT_NE(ctx.find("Cell Retrieval Results:\n(none)"), std::string::npos) << ctx;
}

TEST(PromptsTest, ToolNamesRoundTrip) {
    for (auto tool : {SolverTool::table_expr, SolverTool::pandas_shell}) {
        EXPECT_EQ(parse_solver_tool(solver_tool_name(tool)), tool);
        EXPECT_NE(solver_template(tool).find("{table_context}"), std::string_view::npos);
    }
    EXPECT_THROW(parse_solver_tool("sql"), FormatError);
}
