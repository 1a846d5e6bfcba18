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


#include "tablerag/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

#include "tablerag/errors.hpp"
#include "tablerag/text.hpp"

namespace tablerag {

std::vector<std::string> bm25_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (word) {
            current.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Bm25Index::Bm25Index(std::span<const std::string> documents, Bm25Params params) : params_(params) {
    term_freqs_.reserve(documents.size());
    doc_lengths_.reserve(documents.size());
    double total = 0.0;
    for (const auto& doc : documents) {
        auto tokens = bm25_tokenize(doc);
        std::unordered_map<std::string, std::size_t> tf;
        for (auto& t : tokens) ++tf[std::move(t)];
        for (const auto& [term, _] : tf) ++doc_freq_[term];
        doc_lengths_.push_back(tokens.size());
        total += static_cast<double>(tokens.size());
        term_freqs_.push_back(std::move(tf));
    }
    avg_length_ = documents.empty() ? 0.0 : total / static_cast<double>(documents.size());
}

double Bm25Index::idf(const std::string& term) const {
    auto it = doc_freq_.find(term);
    double df = it == doc_freq_.end() ? 0.0 : static_cast<double>(it->second);
    double n = static_cast<double>(size());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double Bm25Index::score(std::size_t doc, std::span<const std::string> query_terms) const {
    const auto& tf = term_freqs_.at(doc);
    double len_norm = avg_length_ > 0.0 ? static_cast<double>(doc_lengths_[doc]) / avg_length_ : 0.0;
    double s = 0.0;
    for (const auto& term : query_terms) {
        auto it = tf.find(term);
        if (it == tf.end()) continue;
        double f = static_cast<double>(it->second);
        s += idf(term) * f * (params_.k1 + 1.0) / (f + params_.k1 * (1.0 - params_.b + params_.b * len_norm));
    }
    return s;
}

std::vector<double> Bm25Index::score_all(std::string_view query_text) const {
    auto tokens = bm25_tokenize(query_text);
    std::vector<std::string> terms;
    std::unordered_set<std::string> seen;
    for (auto& t : tokens) {
        if (seen.insert(t).second) terms.push_back(std::move(t));
    }
    std::vector<double> scores(size(), 0.0);
    for (std::size_t d = 0; d < size(); ++d) scores[d] = score(d, terms);
    return scores;
}

SearchCorpus::SearchCorpus(std::size_t dim, std::vector<std::string> keys, std::span<const EmbeddingVector> vectors)
    : dim_(dim), keys_(std::move(keys)) {
    if (vectors.size() != keys_.size()) {
        throw DimMismatch(std::to_string(keys_.size()) + " keys but " + std::to_string(vectors.size()) + " vectors");
    }
    matrix_.reserve(keys_.size() * dim_);
    for (const auto& v : vectors) {
        if (v.size() != dim_) {
            throw DimMismatch("vector of dim " + std::to_string(v.size()) + " in corpus of dim " + std::to_string(dim_));
        }
        matrix_.insert(matrix_.end(), v.begin(), v.end());
    }
    bm25_ = Bm25Index(keys_);
}

std::string_view retrieval_mode_name(RetrievalMode mode) {
    switch (mode) {
        case RetrievalMode::embed: return "embed";
        case RetrievalMode::bm25: return "bm25";
        case RetrievalMode::hybrid: return "hybrid";
    }
    return "embed";
}

RetrievalMode parse_retrieval_mode(std::string_view name) {
    if (name == "embed") return RetrievalMode::embed;
    if (name == "bm25") return RetrievalMode::bm25;
    if (name == "hybrid") return RetrievalMode::hybrid;
    throw FormatError("unknown retrieval mode '" + std::string(name) + "' (expected embed, bm25 or hybrid)");
}

double cosine(std::span<const float> a, std::span<const float> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

// Total order used everywhere hits are ranked.
auto hit_order(const SearchCorpus& corpus) {
    return [&corpus](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        const auto& ka = corpus.key(a.entry);
        const auto& kb = corpus.key(b.entry);
        if (ka != kb) return ka < kb;
        return a.entry < b.entry;
    };
}

std::vector<ScoredHit> take_top(const SearchCorpus& corpus, std::vector<ScoredHit> hits, std::size_t k) {
    auto order = hit_order(corpus);
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), order);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), order);
    }
    return hits;
}

void check_dim(const SearchCorpus& corpus, std::span<const float> query) {
    if (query.size() != corpus.dim()) {
        throw DimMismatch("query of dim " + std::to_string(query.size()) + " against corpus of dim " +
                          std::to_string(corpus.dim()));
    }
}

std::vector<double> dense_scores(const SearchCorpus& corpus, std::span<const float> query) {
    std::vector<double> scores(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) scores[i] = cosine(corpus.vector(i), query);
    return scores;
}

void min_max(std::vector<double>& values) {
    if (values.empty()) return;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    double min = *lo, range = *hi - *lo;
    for (auto& v : values) v = range > 0.0 ? (v - min) / range : 0.0;
}

}  // namespace

std::vector<ScoredHit> vector_topk(const SearchCorpus& corpus, std::span<const float> query, std::size_t k) {
    check_dim(corpus, query);
    auto scores = dense_scores(corpus, query);
    std::vector<ScoredHit> hits(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) hits[i] = {i, scores[i], {}};
    return take_top(corpus, std::move(hits), k);
}

std::vector<ScoredHit> bm25_topk(const SearchCorpus& corpus, std::string_view query_text, std::size_t k) {
    auto scores = corpus.bm25().score_all(query_text);
    std::vector<ScoredHit> hits;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > 0.0) hits.push_back({i, scores[i], {}});
    }
    return take_top(corpus, std::move(hits), k);
}

std::vector<ScoredHit> hybrid_topk(const SearchCorpus& corpus, std::string_view query_text,
                                   std::span<const float> query, std::size_t k, double weight) {
    check_dim(corpus, query);
    auto dense = dense_scores(corpus, query);
    auto lexical = corpus.bm25().score_all(query_text);

    std::vector<std::size_t> pool;
    {
        std::vector<ScoredHit> all(corpus.size());
        for (std::size_t i = 0; i < corpus.size(); ++i) all[i] = {i, dense[i], {}};
        for (const auto& h : take_top(corpus, std::move(all), k)) pool.push_back(h.entry);
        std::vector<ScoredHit> lex;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (lexical[i] > 0.0) lex.push_back({i, lexical[i], {}});
        }
        for (const auto& h : take_top(corpus, std::move(lex), k)) pool.push_back(h.entry);
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    }

    std::vector<double> dn, ln;
    for (auto i : pool) {
        dn.push_back(dense[i]);
        ln.push_back(lexical[i]);
    }
    min_max(dn);
    min_max(ln);
    std::vector<ScoredHit> hits;
    for (std::size_t p = 0; p < pool.size(); ++p) {
        hits.push_back({pool[p], weight * dn[p] + (1.0 - weight) * ln[p], {}});
    }
    return take_top(corpus, std::move(hits), k);
}

std::vector<ScoredHit> multi_query_retrieve(std::span<const std::string> queries, const SearchCorpus& corpus,
                                            const Encoder& encoder, const RetrievalConfig& config) {
    std::vector<std::string> usable;
    for (const auto& q : queries) {
        if (!text::trim(q).empty()) usable.push_back(q);
    }
    if (usable.empty()) throw EmptyInput("multi_query_retrieve needs at least one non-blank query");
    if (config.top_k < 1) throw FormatError("top_k must be >= 1");

    std::vector<EmbeddingVector> vectors;
    if (config.mode != RetrievalMode::bm25) vectors = encoder.embed_batch(usable);

    std::map<std::size_t, ScoredHit> best;
    for (std::size_t q = 0; q < usable.size(); ++q) {
        std::vector<ScoredHit> hits;
        switch (config.mode) {
            case RetrievalMode::embed: hits = vector_topk(corpus, vectors[q], config.top_k); break;
            case RetrievalMode::bm25: hits = bm25_topk(corpus, usable[q], config.top_k); break;
            case RetrievalMode::hybrid:
                hits = hybrid_topk(corpus, usable[q], vectors[q], config.top_k, config.hybrid_weight);
                break;
        }
        for (auto& h : hits) {
            auto it = best.find(h.entry);
            if (it == best.end() || h.score > it->second.score) {
                h.source_query = usable[q];
                best[h.entry] = std::move(h);
            }
        }
    }
    std::vector<ScoredHit> merged;
    merged.reserve(best.size());
    for (auto& [_, h] : best) merged.push_back(std::move(h));
    std::sort(merged.begin(), merged.end(), hit_order(corpus));
    return merged;
}

}  // namespace tablerag
