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

#include <random>

#include "oracles.hpp"
#include "tablerag/ingestion.hpp"
#include "tablerag/interpreter.hpp"

using namespace tablerag;

namespace {

Table wallet() { return load_table_csv(oracle::fixture("wallet_orders.csv"), "orders"); }

}  // namespace

TEST(InterpreterTest, WalletAveragePrice) {
    auto t = wallet();
    TableEnv env(t);
    EXPECT_EQ(env.execute("agg(item_total, mean)"), "Error: column not numeric");
    EXPECT_EQ(env.execute("cast(item_total, float)"), "success!");
    EXPECT_EQ(env.execute("contains(description, \"wallet\") |> agg(item_total, mean)"), "200");
    // The cast persisted, the filter did not.
    EXPECT_EQ(env.execute("agg(item_total, max)"), "1299");
    EXPECT_EQ(env.execute("agg(item_total, count)"), "10");
}

TEST(InterpreterTest, Aggregates) {
    auto t = wallet();
    EXPECT_EQ(interpret_action(t, "agg(quantity, sum)"), "17");
    EXPECT_EQ(interpret_action(t, "agg(quantity, mean)"), "1.7");
    EXPECT_EQ(interpret_action(t, "agg(quantity, min)"), "1");
    EXPECT_EQ(interpret_action(t, "filter(order_status, ==, \"Returned to seller\") |> agg(order_no, count)"), "2");
    EXPECT_EQ(interpret_action(t, "filter(quantity, >, 10) |> agg(quantity, mean)"), "nan");
    EXPECT_EQ(interpret_action(t, "filter(quantity, >, 10) |> agg(quantity, sum)"), "0");
    EXPECT_EQ(interpret_action(t, "agg(quantity, median)"), "Error: unknown aggregate 'median'");
    EXPECT_EQ(interpret_action(t, "agg(quantity, sum) |> head(1)"), "Error: agg must be the last operation");
}

TEST(InterpreterTest, FilterProjectSortRender) {
    auto t = wallet();
    EXPECT_EQ(interpret_action(t, "filter(quantity, >=, 3) |> project(order_no, quantity)"),
              "order_no,quantity\n402-2222222-3333333,3\n403-4444444-5555555,4\n[2 rows x 2 columns]");
    EXPECT_EQ(interpret_action(t, "df |> sort(quantity, desc) |> head(2) |> project([quantity, ship_city])"),
              "quantity,ship_city\n4,PUNE\n3,DELHI\n[2 rows x 2 columns]");
    EXPECT_EQ(interpret_action(t, "contains(description, 'clutch') |> project(description)"),
              "description\n\"Women's Leather Clutch, Black\"\n[1 rows x 1 columns]");
    EXPECT_EQ(interpret_action(t, "head(0) |> project(order_no, quantity)"), "Empty table\nColumns: order_no, quantity");
    EXPECT_EQ(interpret_action(t, "filter(ship_city, = , PUNE) |> agg(order_no, count)"), "2");
}

TEST(InterpreterTest, DefaultRenderShowsFiveRows) {
    auto out = interpret_action(wallet(), "project(ship_city)");
    EXPECT_EQ(out, "ship_city\nMUMBAI\nBENGALURU\nPUNE\nMUMBAI\nCHENNAI\n[10 rows x 1 columns]");
}

TEST(InterpreterTest, DistinctAndSortStability) {
    auto t = wallet();
    EXPECT_EQ(interpret_action(t, "distinct(order_status)"),
              "order_status\nDelivered to buyer\nReturned to seller\n[2 rows x 1 columns]");
    // Ties keep table order.
    EXPECT_EQ(interpret_action(t, "sort(quantity, asc) |> head(3) |> project(order_no)"),
              "order_no\n402-4845680-8041921\n405-9763961-5211537\n403-1107364-7465965\n[3 rows x 1 columns]");
}

TEST(InterpreterTest, Errors) {
    auto t = wallet();
    EXPECT_EQ(interpret_action(t, ""), "Error: empty action");
    EXPECT_EQ(interpret_action(t, "agg(price, mean)"), "Error: unknown column 'price'");
    EXPECT_EQ(interpret_action(t, "explode(quantity)"), "Error: unknown operation 'explode'");
    EXPECT_EQ(interpret_action(t, "head(-1)"), "Error: head expects a non-negative integer");
    EXPECT_EQ(interpret_action(t, "contains(description, \"wallet)"), "Error: unterminated quote");
    EXPECT_EQ(interpret_action(t, "filter(quantity, ~, 1)"), "Error: unknown comparison '~'");
    EXPECT_EQ(interpret_action(t, "sort(quantity, up)"), "Error: sort direction must be asc or desc");
    EXPECT_EQ(interpret_action(t, "df['item_total'].mean()").rfind("Error: ", 0), 0u);
}

TEST(InterpreterTest, FailedCastChangesNothing) {
    auto t = wallet();
    TableEnv env(t);
    auto out = env.execute("cast(quantity, float) |> cast(description, int)");
    EXPECT_EQ(out.rfind("Error: cannot cast value", 0), 0u) << out;
    EXPECT_EQ(env.frame().find("quantity")->dtype, ColumnDType::integer);
    // Currency decoration is stripped; all totals are whole numbers.
    EXPECT_EQ(env.execute("cast(item_total, int) |> agg(item_total, sum)"), "4443");
    EXPECT_EQ(env.frame().find("item_total")->dtype, ColumnDType::integer);

    Table frac("t", {{"x", {"1", "1.5"}}});
    EXPECT_EQ(interpret_action(frac, "cast(x, int)"), "Error: cannot cast value '1.5' in column 'x' to integer");
}

TEST(InterpreterTest, NullsNeverMatchAndSortLast) {
    Table t("t", {{"n", {"3", "", "1", "null", "2"}}, {"id", {"a", "b", "c", "d", "e"}}});
    EXPECT_EQ(interpret_action(t, "filter(n, !=, 1) |> agg(id, count)"), "2");
    EXPECT_EQ(interpret_action(t, "sort(n, desc) |> project(id)"), "id\na\ne\nc\nb\nd\n[5 rows x 1 columns]");
    EXPECT_EQ(interpret_action(t, "agg(n, count)"), "3");
}

TEST(InterpreterTest, DatetimeColumns) {
    Table t("t", {{"day", {"2024-03-01", "2023-12-31", "2024-01-15"}}, {"v", {"1", "2", "3"}}});
    EXPECT_EQ(interpret_action(t, "agg(day, max)"), "2024-03-01");
    EXPECT_EQ(interpret_action(t, "filter(day, <, 2024-01-01) |> agg(v, sum)"), "2");
    EXPECT_EQ(interpret_action(t, "agg(day, mean)"), "Error: column not numeric");
}

TEST(InterpreterTest, NumericFilterMatchesBruteForce) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> val(-50, 50);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> cells;
        std::vector<int> values;
        for (int i = 0; i < 40; ++i) {
            values.push_back(val(rng));
            cells.push_back(std::to_string(values.back()));
        }
        Table t("t", {{"x", cells}});
        int pivot = val(rng);
        for (const std::string op : {"==", "!=", "<", "<=", ">", ">="}) {
            long expected_count = 0, expected_sum = 0;
            for (int v : values) {
                bool keep = op == "==" ? v == pivot
                          : op == "!=" ? v != pivot
                          : op == "<"  ? v < pivot
                          : op == "<=" ? v <= pivot
                          : op == ">"  ? v > pivot
                                       : v >= pivot;
                if (keep) {
                    ++expected_count;
                    expected_sum += v;
                }
            }
            auto prefix = "filter(x, " + op + ", " + std::to_string(pivot) + ") |> ";
            EXPECT_EQ(interpret_action(t, prefix + "agg(x, count)"), std::to_string(expected_count));
            EXPECT_EQ(interpret_action(t, prefix + "agg(x, sum)"), std::to_string(expected_sum));
        }
    }
}
