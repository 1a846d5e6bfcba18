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

#include <map>
#include <random>

#include "oracles.hpp"
#include "tablerag/errors.hpp"
#include "tablerag/retrieval.hpp"

using namespace tablerag;

namespace {

std::vector<std::string> random_docs(std::mt19937_64& rng, std::size_t n) {
    static const std::vector<std::string> words = {"wallet", "leather", "bag", "red", "blue", "Delivered",
                                                   "buyer", "seller", "caf\xC3\xA9", "42", "x-ray"};
    std::uniform_int_distribution<std::size_t> len(1, 6), pick(0, words.size() - 1);
    std::vector<std::string> docs;
    for (std::size_t i = 0; i < n; ++i) {
        std::string d;
        for (std::size_t k = len(rng); k > 0; --k) d += words[pick(rng)] + (k % 2 ? " " : ", ");
        docs.push_back(d);
    }
    return docs;
}

SearchCorpus corpus_of(const std::vector<std::string>& keys, const std::vector<std::vector<float>>& vecs) {
    return SearchCorpus(vecs.empty() ? 2 : vecs[0].size(), keys, vecs);
}

}  // namespace

TEST(RetrievalTest, Bm25Tokenizer) {
    EXPECT_EQ(bm25_tokenize("Delivered to-Buyer, 2x!"), (std::vector<std::string>{"delivered", "to", "buyer", "2x"}));
    EXPECT_EQ(bm25_tokenize("caf\xC3\xA9 ok"), (std::vector<std::string>{"caf\xC3\xA9", "ok"}));
    EXPECT_TRUE(bm25_tokenize(" ,; ").empty());
}

TEST(RetrievalTest, Bm25MatchesDirectFormula) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        auto docs = random_docs(rng, 5 + trial);
        Bm25Index idx(docs);
        for (const std::string q : {"wallet", "leather wallet wallet", "BUYER seller", "caf\xC3\xA9", "zzz"}) {
            auto scores = idx.score_all(q);
            for (std::size_t d = 0; d < docs.size(); ++d) {
                EXPECT_NEAR(scores[d], oracle::okapi(docs, q, d), 1e-9) << q << " / " << docs[d];
            }
        }
    }
}

TEST(RetrievalTest, IdfStaysNonNegative) {
    std::vector<std::string> docs = {"a", "a", "a", "b"};
    Bm25Index idx(docs);
    EXPECT_GT(idx.idf("a"), 0.0);
    EXPECT_GT(idx.idf("b"), idx.idf("a"));
    EXPECT_GT(idx.idf("unseen"), idx.idf("b"));
}

TEST(RetrievalTest, VectorTopkMatchesFullScan) {
    std::mt19937_64 rng(2);
    auto vecs = oracle::random_unit_vectors(rng, 300, 16);
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < vecs.size(); ++i) keys.push_back("k" + std::to_string(i));
    auto corpus = corpus_of(keys, vecs);
    for (std::size_t k : {1u, 5u, 30u, 500u}) {
        auto q = oracle::random_unit_vectors(rng, 1, 16)[0];
        auto hits = vector_topk(corpus, q, k);
        auto expected = oracle::full_scan_topk(vecs, keys, q, k);
        ASSERT_EQ(hits.size(), expected.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            EXPECT_EQ(hits[i].entry, expected[i]);
            EXPECT_NEAR(hits[i].score, oracle::cos_sim(vecs[hits[i].entry], q), 1e-9);
        }
    }
}

TEST(RetrievalTest, VectorTiesBreakByKey) {
    std::vector<std::vector<float>> vecs = {{1, 0}, {1, 0}, {0, 1}};
    auto corpus = corpus_of({"zeta", "alpha", "mid"}, vecs);
    std::vector<float> q = {1, 0};
    auto hits = vector_topk(corpus, q, 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].entry, 1u);
    EXPECT_EQ(hits[1].entry, 0u);
}

TEST(RetrievalTest, DimensionChecks) {
    std::vector<std::vector<float>> vecs = {{1, 0}};
    auto corpus = corpus_of({"a"}, vecs);
    std::vector<float> q = {1, 0, 0};
    EXPECT_THROW(vector_topk(corpus, q, 1), DimMismatch);
    std::vector<std::vector<float>> bad = {{1, 0, 0}};
    EXPECT_THROW(SearchCorpus(2, {"a"}, bad), DimMismatch);
}

TEST(RetrievalTest, Bm25TopkDropsZeroScores) {
    std::vector<std::vector<float>> vecs = {{1, 0}, {0, 1}, {1, 1}};
    auto corpus = corpus_of({"order_status: Delivered to buyer", "ship_city: PUNE", "order_status: Returned"}, vecs);
    auto hits = bm25_topk(corpus, "delivered", 5);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].entry, 0u);
    EXPECT_TRUE(bm25_topk(corpus, "nothing here", 5).empty());
}

TEST(RetrievalTest, HybridHandComputed) {
    std::vector<std::vector<float>> vecs = {{1, 0}, {0, 1}, {0.6f, 0.8f}};
    auto corpus = corpus_of({"apple pie", "banana split", "apple banana"}, vecs);
    std::vector<float> q = {1, 0};

    // Pool is everything; dense [1, 0, 0.6], bm25 normalised [1, 0, 1].
    auto hits = hybrid_topk(corpus, "apple", q, 3, 0.5);
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0].entry, 0u);
    EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
    EXPECT_EQ(hits[1].entry, 2u);
    EXPECT_NEAR(hits[1].score, 0.8, 1e-6);
    EXPECT_EQ(hits[2].entry, 1u);
    EXPECT_NEAR(hits[2].score, 0.0, 1e-6);

    // K=1: pool {0, 2}; both BM25 scores equal so that range normalises to 0.
    auto one = hybrid_topk(corpus, "apple", q, 1, 0.5);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].entry, 0u);
    EXPECT_NEAR(one[0].score, 0.5, 1e-9);

    // w = 1 reduces to dense order, w = 0 to BM25 order.
    EXPECT_EQ(hybrid_topk(corpus, "banana", q, 1, 1.0)[0].entry, 0u);
    EXPECT_EQ(hybrid_topk(corpus, "banana split", q, 1, 0.0)[0].entry, 1u);
}

TEST(RetrievalTest, MultiQueryKeepsBestScorePerEntry) {
    HashingEncoder enc(64);
    std::vector<std::string> keys = {"description: leather wallet", "description: laptop bag", "ship_city: PUNE",
                                     "order_status: Returned to seller", "item_total: $100.00"};
    auto corpus = SearchCorpus(64, keys, enc.embed_batch(keys));
    std::vector<std::string> queries = {"wallet", "  ", "returned", "bag"};
    RetrievalConfig cfg;
    cfg.top_k = 2;
    auto hits = multi_query_retrieve(queries, corpus, enc, cfg);

    std::map<std::size_t, std::pair<double, std::string>> oracle_best;
    for (const auto& q : queries) {
        if (oracle::strip(q).empty()) continue;
        auto qv = enc.embed(q);
        for (auto i : oracle::full_scan_topk([&] {
                 std::vector<std::vector<float>> v;
                 for (std::size_t j = 0; j < keys.size(); ++j) {
                     auto s = corpus.vector(j);
                     v.emplace_back(s.begin(), s.end());
                 }
                 return v;
             }(),
                                             keys, qv, 2)) {
            double s = cosine(corpus.vector(i), qv);
            auto it = oracle_best.find(i);
            if (it == oracle_best.end() || s > it->second.first) oracle_best[i] = {s, q};
        }
    }
    ASSERT_EQ(hits.size(), oracle_best.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_NEAR(hits[i].score, oracle_best[hits[i].entry].first, 1e-12);
        EXPECT_EQ(hits[i].source_query, oracle_best[hits[i].entry].second);
        if (i > 0) {
            EXPECT_GE(hits[i - 1].score, hits[i].score);
        }
    }
}

TEST(RetrievalTest, MultiQueryErrorsAndModes) {
    HashingEncoder enc(32);
    std::vector<std::string> keys = {"a: x", "b: y"};
    auto corpus = SearchCorpus(32, keys, enc.embed_batch(keys));
    std::vector<std::string> blank = {" ", ""};
    EXPECT_THROW(multi_query_retrieve(blank, corpus, enc, {}), EmptyInput);
    std::vector<std::string> q = {"x"};
    RetrievalConfig cfg{1, RetrievalMode::bm25, 0.5};
    auto hits = multi_query_retrieve(q, corpus, enc, cfg);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].entry, 0u);
    EXPECT_EQ(parse_retrieval_mode("hybrid"), RetrievalMode::hybrid);
    EXPECT_THROW(parse_retrieval_mode("dense"), FormatError);

    SearchCorpus empty(32, {}, std::vector<EmbeddingVector>{});
    EXPECT_TRUE(multi_query_retrieve(q, empty, enc, {}).empty());
}
