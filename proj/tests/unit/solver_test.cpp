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

#include <algorithm>
#include <atomic>
#include <random>

#include <json.hpp>

#include "oracles.hpp"
#include "tablerag/errors.hpp"
#include "tablerag/ingestion.hpp"
#include "tablerag/solver.hpp"

using namespace tablerag;

namespace {

Table wallet() { return load_table_csv(oracle::fixture("wallet_orders.csv"), "orders"); }

SolverPrompt simple_prompt() { return render_solver_prompt("orders", "What is the average price for wallets?", "ctx"); }

// Sampling model: reply i (by call order) comes from a fixed list.
class CyclingModel final : public ChatModel {
public:
    explicit CyclingModel(std::vector<std::string> replies, bool throw_on_third = false)
        : replies_(std::move(replies)), throw_on_third_(throw_on_third) {}
    std::string complete(std::string_view, const ChatParams&) override {
        auto i = calls.fetch_add(1);
        if (throw_on_third_ && i == 2) throw RemoteError("boom");
        return replies_[i % replies_.size()];
    }
    std::size_t max_concurrency() const override { return 4; }
    std::atomic<std::size_t> calls{0};

private:
    std::vector<std::string> replies_;
    bool throw_on_third_;
};

Answer answer(const std::string& line) { return extract_final_answer("Final Answer: " + line); }

}  // namespace

TEST(SolverTest, ThreeStepWalletTrace) {
    auto lm = ScriptedChatModel::from_file(oracle::fixture("wallet_script.json"));
    // Skip the two expansion entries.
    lm->complete("suggest some column names", {});
    lm->complete("extract some keywords", {});
    auto t = wallet();
    auto trace = react_loop(*lm, t, simple_prompt());
    ASSERT_EQ(trace.steps.size(), 3u);
    EXPECT_EQ(trace.steps[0].action, "cast(item_total, float)");
    EXPECT_EQ(trace.steps[0].observation, "success!");
    EXPECT_EQ(trace.steps[1].observation, "200");
    EXPECT_TRUE(trace.steps[2].final);
    EXPECT_FALSE(trace.answer.failed);
    EXPECT_EQ(trace.answer.parts, std::vector<std::string>{"200"});
    std::vector<std::string> gold = {"200"};
    EXPECT_TRUE(normalize_and_match(trace.answer, gold));

    // The third call saw both earlier observations.
    auto prompts = lm->prompts();
    ASSERT_EQ(prompts.size(), 5u);
    EXPECT_NE(prompts[4].find("\nObservation: success!\n"), std::string::npos);
    EXPECT_NE(prompts[4].find("\nObservation: 200\n"), std::string::npos);

    auto jsonl = trace_to_jsonl(trace);
    auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
    EXPECT_EQ(first["step"], 1);
    EXPECT_EQ(first["observation"], "success!");
    EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 3);
}

TEST(SolverTest, ImmediateFinalAnswer) {
    ScriptedChatModel lm({{"", "Thought: easy.\nFinal Answer: 2", false}});
    auto trace = react_loop(lm, wallet(), simple_prompt());
    ASSERT_EQ(trace.steps.size(), 1u);
    EXPECT_EQ(trace.steps[0].thought, "easy.");
    EXPECT_EQ(trace.answer.parts, std::vector<std::string>{"2"});
    EXPECT_EQ(trace.total_prompt_tokens, simple_prompt().token_count);
}

TEST(SolverTest, StepLimitFails) {
    ScriptedChatModel lm({{"", "Thought: look.\nAction: head(1)", true}});
    SolverOptions opt;
    opt.max_steps = 3;
    auto trace = react_loop(lm, wallet(), simple_prompt(), opt);
    EXPECT_EQ(trace.steps.size(), 3u);
    EXPECT_TRUE(trace.answer.failed);
    EXPECT_EQ(trace.answer.reason, "step limit exceeded");
    EXPECT_TRUE(trace.steps.back().exhausted);
    EXPECT_FALSE(trace.steps.front().exhausted);
    opt.max_steps = 0;
    EXPECT_THROW(react_loop(lm, wallet(), simple_prompt(), opt), InvalidTarget);
}

TEST(SolverTest, MissingActionAndBadActionBecomeObservations) {
    ScriptedChatModel lm({{"", "Thought: hmm", false},
                          {"", "Action: agg(nope, sum)", false},
                          {"", "Final Answer: x", false}});
    auto trace = react_loop(lm, wallet(), simple_prompt());
    ASSERT_EQ(trace.steps.size(), 3u);
    EXPECT_EQ(trace.steps[0].observation.rfind("Error: no Action line", 0), 0u);
    EXPECT_EQ(trace.steps[1].observation, "Error: unknown column 'nope'");
}

TEST(SolverTest, ScriptExhaustionPropagates) {
    ScriptedChatModel lm({});
    EXPECT_THROW(react_loop(lm, wallet(), simple_prompt()), ScriptExhausted);
}

TEST(SolverTest, ExtractFinalAnswer) {
    EXPECT_EQ(answer("a, b,c").parts, (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(answer("1,000, 2").parts, (std::vector<std::string>{"1,000", "2"}));
    EXPECT_EQ(answer("1,2345").parts, (std::vector<std::string>{"1", "2345"}));
    EXPECT_EQ(answer("\"Smith, John\", Doe").parts, (std::vector<std::string>{"Smith, John", "Doe"}));
    auto last = extract_final_answer("Final Answer: 1\nThought: wait\nFinal Answer: 2\ntrailing");
    EXPECT_EQ(last.parts, std::vector<std::string>{"2"});
    EXPECT_THROW(extract_final_answer("no marker"), NoFinalAnswer);
    EXPECT_THROW(extract_final_answer("Final Answer:   \n"), NoFinalAnswer);
}

TEST(SolverTest, NormalizeAndMatch) {
    EXPECT_EQ(normalize_answer_part(" $1,299.00 "), "1299.00");
    EXPECT_EQ(normalize_answer_part("\xE2\x82\xAC" "5"), "5");
    EXPECT_EQ(normalize_answer_part("Delivered To Buyer"), "delivered to buyer");
    std::vector<std::string> g200 = {"200"};
    EXPECT_TRUE(normalize_and_match(answer("$200.00"), g200));
    EXPECT_TRUE(normalize_and_match(answer("200.0000001"), g200));
    EXPECT_FALSE(normalize_and_match(answer("200.01"), g200));
    EXPECT_FALSE(normalize_and_match(answer("200, 1"), g200));
    std::vector<std::string> two = {"PUNE", "delhi"};
    EXPECT_TRUE(normalize_and_match(answer("Delhi, pune"), two));
    std::vector<std::string> dup = {"1", "1"};
    EXPECT_FALSE(normalize_and_match(answer("1, 2"), dup));
    EXPECT_FALSE(normalize_and_match(Answer::failure("x"), g200));
}

TEST(SolverTest, MatchingIsOrderInvariant) {
    std::mt19937_64 rng(4);
    std::vector<std::string> gold = {"1", "2.5", "apple", "1,000", "x"};
    for (int i = 0; i < 30; ++i) {
        auto shuffled = gold;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::string line;
        for (std::size_t k = 0; k < shuffled.size(); ++k) line += (k ? ", " : "") + shuffled[k];
        EXPECT_TRUE(normalize_and_match(answer(line), gold)) << line;
    }
}

TEST(SolverTest, MajorityVote) {
    std::vector<Answer> votes = {answer("b"), answer("a, b"), answer("B, A"), Answer::failure("x"), answer("b")};
    auto v = majority_vote(votes);
    EXPECT_EQ(v.raw, "b");  // two each; the earliest wins
    votes.push_back(answer("b, a"));
    EXPECT_EQ(majority_vote(votes).raw, "a, b");
    std::vector<Answer> failed = {Answer::failure("x")};
    EXPECT_TRUE(majority_vote(failed).failed);
    EXPECT_TRUE(majority_vote({}).failed);
}

TEST(SolverTest, VotesAcrossSampledRuns) {
    CyclingModel lm({"Final Answer: 7", "Final Answer: 7", "Final Answer: 8"});
    SolverOptions opt;
    opt.n_votes = 10;
    auto r = solve_with_votes(lm, wallet(), simple_prompt(), opt);
    EXPECT_EQ(lm.calls.load(), 10u);
    EXPECT_EQ(r.traces.size(), 10u);
    EXPECT_EQ(r.answer.parts, std::vector<std::string>{"7"});
    EXPECT_EQ(r.total_prompt_tokens, 10 * simple_prompt().token_count);
}

TEST(SolverTest, DeterministicModelRunsOnce) {
    ScriptedChatModel lm({{"", "Final Answer: 5", true}});
    auto r = solve_with_votes(lm, wallet(), simple_prompt());
    EXPECT_EQ(lm.prompts().size(), 1u);
    EXPECT_EQ(r.answer.parts, std::vector<std::string>{"5"});
}

TEST(SolverTest, VoteRunnerRethrows) {
    CyclingModel lm({"Final Answer: 1"}, true);
    EXPECT_THROW(solve_with_votes(lm, wallet(), simple_prompt()), RemoteError);
}
