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


#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/ingestion.hpp"
#include "tablerag/lm.hpp"
#include "tablerag/text.hpp"

namespace tablerag {

std::size_t count_tokens(std::string_view text) {
    return (text::utf8_length(text) + 3) / 4;
}

void l2_normalize(EmbeddingVector& v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    if (sq <= 0.0) throw EmptyInput("cannot normalise a zero vector");
    double inv = 1.0 / std::sqrt(sq);
    for (float& x : v) x = static_cast<float>(x * inv);
}

EmbeddingVector Encoder::embed(const std::string& text) const {
    auto out = embed_batch(std::span<const std::string>(&text, 1));
    return std::move(out.front());
}

namespace {

std::uint64_t fnv1a(std::uint64_t seed, std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    // final avalanche so low bits are usable as a bucket index
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return h;
}

void check_inputs(std::span<const std::string> texts) {
    if (texts.empty()) throw EmptyInput("embed_batch called with no texts");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (text::trim(texts[i]).empty()) throw EmptyInput("text " + std::to_string(i) + " is blank");
    }
}

}  // namespace

HashingEncoder::HashingEncoder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw EmptyInput("encoder dimension must be positive");
}

std::string HashingEncoder::name() const {
    return "hashing-trigram:" + std::to_string(dim_) + ":" + std::to_string(seed_);
}

std::vector<EmbeddingVector> HashingEncoder::embed_batch(std::span<const std::string> texts) const {
    check_inputs(texts);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        std::string padded = " " + text::to_lower(text::trim(t)) + " ";
        EmbeddingVector v(dim_, 0.0f);
        for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
            auto h = fnv1a(seed_, std::string_view(padded).substr(i, 3));
            v[h % dim_] += (h >> 63) ? -1.0f : 1.0f;
        }
        // Opposite-signed collisions can cancel everything out.
        bool zero = std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; });
        if (zero) v[fnv1a(seed_, padded) % dim_] = 1.0f;
        l2_normalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> CountingEncoder::embed_batch(std::span<const std::string> texts) const {
    std::size_t tokens = 0;
    for (const auto& t : texts) tokens += count_tokens(t);
    texts_ += texts.size();
    tokens_ += tokens;
    return inner_->embed_batch(texts);
}

std::string apply_stop_sequences(std::string text, std::span<const std::string> stops) {
    std::size_t cut = text.size();
    for (const auto& stop : stops) {
        if (stop.empty()) continue;
        auto pos = text.find(stop);
        if (pos != std::string::npos && pos < cut) cut = pos;
    }
    text.resize(cut);
    return text;
}

ScriptedChatModel::ScriptedChatModel(std::vector<ScriptEntry> entries)
    : entries_(std::move(entries)), consumed_(entries_.size(), false) {}

std::unique_ptr<ScriptedChatModel> ScriptedChatModel::from_json(std::string_view json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("playback script: ") + e.what());
    }
    if (!doc.is_array()) throw FormatError("playback script must be a JSON list");
    std::vector<ScriptEntry> entries;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& e = doc[i];
        if (!e.is_object() || !e.contains("prompt_contains") || !e.contains("reply") ||
            !e["prompt_contains"].is_string() || !e["reply"].is_string()) {
            throw FormatError("playback script entry " + std::to_string(i) +
                              " needs string fields prompt_contains and reply");
        }
        entries.push_back({e["prompt_contains"].get<std::string>(), e["reply"].get<std::string>(),
                           e.value("reusable", false)});
    }
    return std::make_unique<ScriptedChatModel>(std::move(entries));
}

std::unique_ptr<ScriptedChatModel> ScriptedChatModel::from_file(const std::filesystem::path& path) {
    return from_json(read_file(path));
}

std::string ScriptedChatModel::complete(std::string_view prompt, const ChatParams& params) {
    std::lock_guard lock(mu_);
    prompts_.emplace_back(prompt);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (consumed_[i] || prompt.find(entries_[i].prompt_contains) == std::string_view::npos) continue;
        if (!entries_[i].reusable) consumed_[i] = true;
        return apply_stop_sequences(entries_[i].reply, params.stop_sequences);
    }
    auto excerpt = std::string(text::utf8_prefix(prompt, 80));
    throw ScriptExhausted("no scripted reply for prompt starting \"" + excerpt + "\"");
}

std::vector<std::string> ScriptedChatModel::prompts() const {
    std::lock_guard lock(mu_);
    return prompts_;
}

std::size_t ScriptedChatModel::remaining() const {
    std::lock_guard lock(mu_);
    return static_cast<std::size_t>(std::count(consumed_.begin(), consumed_.end(), false));
}

}  // namespace tablerag
