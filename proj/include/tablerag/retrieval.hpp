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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tablerag/lm.hpp"

namespace tablerag {

/// Lower-cases and splits on every byte that is not an ASCII letter or digit.
/// Bytes >= 0x80 are kept inside tokens so UTF-8 words stay whole.
std::vector<std::string> bm25_tokenize(std::string_view text);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi BM25 over a fixed document list, with the non-negative IDF
/// ln(1 + (N - df + 0.5) / (df + 0.5)). Query terms are de-duplicated.
class Bm25Index {
public:
    Bm25Index() = default;
    explicit Bm25Index(std::span<const std::string> documents, Bm25Params params = {});

    std::size_t size() const { return doc_lengths_.size(); }
    double idf(const std::string& term) const;
    double score(std::size_t doc, std::span<const std::string> query_terms) const;
    /// Scores of every document for `query_text`.
    std::vector<double> score_all(std::string_view query_text) const;

private:
    Bm25Params params_;
    std::vector<std::unordered_map<std::string, std::size_t>> term_freqs_;
    std::vector<std::size_t> doc_lengths_;
    std::unordered_map<std::string, std::size_t> doc_freq_;
    double avg_length_ = 0.0;
};

/// Searchable key texts with their unit vectors (row-major) and BM25 stats.
class SearchCorpus {
public:
    SearchCorpus() = default;
    /// Throws DimMismatch when a vector's length differs from `dim`.
    SearchCorpus(std::size_t dim, std::vector<std::string> keys, std::span<const EmbeddingVector> vectors);

    std::size_t size() const { return keys_.size(); }
    std::size_t dim() const { return dim_; }
    const std::string& key(std::size_t i) const { return keys_[i]; }
    const std::vector<std::string>& keys() const { return keys_; }
    std::span<const float> vector(std::size_t i) const { return {matrix_.data() + i * dim_, dim_}; }
    std::span<const float> matrix() const { return matrix_; }
    const Bm25Index& bm25() const { return bm25_; }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> keys_;
    std::vector<float> matrix_;
    Bm25Index bm25_;
};

struct ScoredHit {
    std::size_t entry = 0;  // position in the corpus
    double score = 0.0;
    std::string source_query;

    friend bool operator==(const ScoredHit&, const ScoredHit&) = default;
};

enum class RetrievalMode { embed, bm25, hybrid };

std::string_view retrieval_mode_name(RetrievalMode mode);
/// Throws FormatError on an unknown name.
RetrievalMode parse_retrieval_mode(std::string_view name);

struct RetrievalConfig {
    std::size_t top_k = 5;
    RetrievalMode mode = RetrievalMode::embed;
    double hybrid_weight = 0.5;  // weight of the dense score
};

/// Cosine similarity in double precision.
double cosine(std::span<const float> a, std::span<const float> b);

/// Exact top-K by cosine, score descending then key ascending.
/// Throws DimMismatch when the query dimension differs from the corpus.
std::vector<ScoredHit> vector_topk(const SearchCorpus& corpus, std::span<const float> query, std::size_t k);

/// Top-K by BM25 over the key texts; documents scoring zero are dropped.
std::vector<ScoredHit> bm25_topk(const SearchCorpus& corpus, std::string_view query_text, std::size_t k);

/// Min-max normalises dense and BM25 scores over the union of both top-K
/// pools, ranks by w * dense + (1 - w) * bm25 and keeps K.
std::vector<ScoredHit> hybrid_topk(const SearchCorpus& corpus, std::string_view query_text,
                                   std::span<const float> query, std::size_t k, double weight);

/// Union of per-query top-K. An entry hit by several queries keeps its best
/// score and the query that produced it; the result is sorted by that score.
std::vector<ScoredHit> multi_query_retrieve(std::span<const std::string> queries, const SearchCorpus& corpus,
                                            const Encoder& encoder, const RetrievalConfig& config);

}  // namespace tablerag
