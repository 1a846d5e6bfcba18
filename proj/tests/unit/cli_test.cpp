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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "tablerag/cli.hpp"
#include "tablerag/corpus.hpp"
#include "tablerag/ingestion.hpp"

using namespace tablerag;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "tablerag_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir.parent_path());
    return dir;
}

std::string fx(const std::string& name) { return oracle::fixture(name).string(); }

fs::path build_wallet_index(const std::string& name) {
    auto dir = scratch(name);
    auto r = run({"--mock-encoder", "build", "--table", fx("wallet_orders.csv"), "--title",
                  "amazon seller order status prediction orders data", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return dir;
}

json config_of(std::vector<std::string> args) {
    args.push_back("config");
    auto r = run(args);
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return json::parse(r.out);
}

}  // namespace

TEST(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"--k", "0", "config"}).code, kExitUsage);
    auto bad = run({"--mock-encoder", "--mock-lm", fx("answer_script.json"), "eval", "--manifest", fx("manifest.json"),
                    "--method", "oracle", "--out", (scratch("bad") / "r.json").string()});
    EXPECT_EQ(bad.code, kExitUsage);
    EXPECT_NE(bad.err.find("--method"), std::string::npos) << bad.err;
}

TEST(CliTest, BuildWritesIndexesAndStats) {
    auto dir = build_wallet_index("build");
    for (const char* f : {"schema.idx", "cells.idx", "stats.json", "table.csv", "meta.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    auto stats = json::parse(read_file(dir / "stats.json"));
    auto table = load_table_csv(oracle::fixture("wallet_orders.csv"), "t");
    EXPECT_EQ(stats["n_distinct"], oracle::distinct_pairs(table).size());
    EXPECT_EQ(stats["n_rows"], 10);
    EXPECT_EQ(stats["n_cols"], 6);
}

TEST(CliTest, BudgetOfOneKeepsOneCell) {
    auto dir = scratch("b1");
    auto r = run({"--mock-encoder", "--budget", "1", "build", "--table", fx("wallet_orders.csv"), "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(load_cell_index(dir / "cells.idx").size(), 1u);
}

TEST(CliTest, RebuildIsByteIdentical) {
    auto a = build_wallet_index("same_a");
    auto b = build_wallet_index("same_b");
    for (const char* f : {"schema.idx", "cells.idx", "stats.json", "table.csv", "meta.json"}) {
        EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
    }
}

TEST(CliTest, AskAnswersWalletQuestion) {
    auto dir = build_wallet_index("ask");
    auto r = run({"--mock-encoder", "--mock-lm", fx("wallet_script.json"), "--trace", "ask", "--index", dir.string(),
                  "--question", "What is the average price for leather wallets?"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::istringstream lines(r.out);
    std::vector<std::string> all;
    for (std::string l; std::getline(lines, l);) all.push_back(l);
    ASSERT_EQ(all.size(), 4u) << r.out;
    EXPECT_EQ(json::parse(all[1])["observation"], "200");
    EXPECT_EQ(all[3], "Final Answer: 200");
}

TEST(CliTest, AskExitCodes) {
    auto dir = build_wallet_index("ask_codes");
    const std::string q = "What is the average price for leather wallets?";
    EXPECT_EQ(run({"--mock-encoder", "--mock-lm", fx("wallet_script.json"), "ask", "--index",
                   (scratch("nothing") / "missing").string(), "--question", q})
                  .code,
              kExitUsage);
    // Only the expansion replies are scripted for this question.
    EXPECT_EQ(run({"--mock-encoder", "--mock-lm", fx("answer_script.json"), "ask", "--index", dir.string(),
                   "--question", q})
                  .code,
              kExitRemoteFailed);
    // One step is not enough for the three-step script.
    EXPECT_EQ(run({"--mock-encoder", "--mock-lm", fx("wallet_script.json"), "--max-steps", "1", "ask", "--index",
                   dir.string(), "--question", q})
                  .code,
              kExitSolveFailed);
    // Index built with the mock encoder, asked with a different one.
    EXPECT_EQ(run({"--mock-lm", fx("wallet_script.json"), "--encoder-base-url", "http://127.0.0.1:1/v1", "ask",
                   "--index", dir.string(), "--question", q})
                  .code,
              kExitUsage);
}

TEST(CliTest, EvalWritesReports) {
    auto dir = scratch("eval");
    auto out = dir / "report.json";
    auto r = run({"--mock-encoder", "--mock-lm", fx("answer_script.json"), "eval", "--manifest", fx("manifest.json"),
                  "--method", "read_schema", "--out", out.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto doc = json::parse(read_file(out));
    EXPECT_DOUBLE_EQ(doc["accuracy"].get<double>(), 0.5);
    EXPECT_TRUE(fs::exists(dir / "report.csv"));
}

TEST(CliTest, EvalModesDifferOnlyInRetrievalFields) {
    auto dir = scratch("modes");
    auto eval = [&](const std::string& mode) {
        auto out = dir / (mode + ".json");
        auto r = run({"--mock-encoder", "--mock-lm", fx("answer_script.json"), "--mode", mode, "--k", "2", "eval",
                      "--manifest", fx("manifest.json"), "--method", "tablerag", "--out", out.string()});
        EXPECT_EQ(r.code, kExitOk) << r.err;
        return json::parse(read_file(out));
    };
    auto strip = [](json doc) {
        for (const char* k : {"mean_prompt_tokens", "total_lm_tokens", "total_encoder_tokens", "column_metrics",
                              "cell_metrics", "config"}) {
            doc.erase(k);
        }
        for (auto& inst : doc["instances"]) {
            for (const char* k : {"prompt_tokens", "lm_tokens", "encoder_tokens", "column_scores", "cell_scores"}) {
                inst.erase(k);
            }
        }
        return doc;
    };
    auto embed = eval("embed"), bm25 = eval("bm25");
    EXPECT_NE(embed.dump(), bm25.dump());
    EXPECT_EQ(strip(embed), strip(bm25));
}

TEST(CliTest, EvalReportsLmFailure) {
    auto dir = scratch("evalfail");
    auto script = dir.parent_path() / "empty_script.json";
    std::ofstream(script) << "[]";
    auto r = run({"--mock-encoder", "--mock-lm", script.string(), "eval", "--manifest", fx("manifest.json"), "--method",
                  "read_schema", "--out", (dir / "r.json").string()});
    EXPECT_EQ(r.code, kExitRemoteFailed);
    EXPECT_TRUE(fs::exists(dir / "r.json"));
}

TEST(CliTest, ExpandWritesTableAndMap) {
    auto dir = scratch("expand");
    auto src = dir.parent_path() / "three_by_two.csv";
    std::ofstream(src) << "city,n\nPUNE,1\nDELHI,2\nPUNE,3\n";
    auto a = dir / "a.csv", b = dir / "b.csv";
    ASSERT_EQ(run({"--seed", "4", "expand", "--table", src.string(), "--rows", "50", "--cols", "50", "--out",
                   a.string()})
                  .code,
              kExitOk);
    ASSERT_EQ(run({"--seed", "4", "expand", "--table", src.string(), "--rows", "50", "--cols", "50", "--out",
                   b.string()})
                  .code,
              kExitOk);
    auto t = load_table_csv(a, "a");
    EXPECT_EQ(t.n_rows(), 50u);
    EXPECT_EQ(t.n_cols(), 50u);
    EXPECT_EQ(read_file(a), read_file(b));
    EXPECT_EQ(read_file(dir / "a.map.json"), read_file(dir / "b.map.json"));
    EXPECT_EQ(run({"expand", "--table", src.string(), "--rows", "2", "--cols", "50", "--out", a.string()}).code,
              kExitUsage);
}

TEST(CliTest, ConfigPrecedence) {
    auto defaults = config_of({});
    EXPECT_EQ(defaults["k"], 5);
    EXPECT_EQ(defaults["budget"], 10000);
    EXPECT_EQ(defaults["votes"], 10);
    EXPECT_EQ(defaults["mode"], "embed");

    auto file = config_of({"--config", fx("config.toml")});
    EXPECT_EQ(file["k"], 3);
    EXPECT_EQ(file["budget"], 7);
    EXPECT_EQ(file["mode"], "bm25");
    EXPECT_EQ(file["votes"], 10);

    auto flag = config_of({"--config", fx("config.toml"), "--k", "4"});
    EXPECT_EQ(flag["k"], 4);
    EXPECT_EQ(flag["budget"], 7);
    EXPECT_EQ(flag["mode"], "bm25");
}
