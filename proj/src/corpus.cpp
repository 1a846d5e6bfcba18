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


#include "tablerag/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <future>
#include <sstream>

#include <json.hpp>

#include "tablerag/errors.hpp"
#include "tablerag/ingestion.hpp"

namespace tablerag {

static_assert(std::endian::native == std::endian::little, "index files assume a little-endian host");

EncodingBudget::EncodingBudget(std::size_t b) : value(b) {
    if (b < 1) throw FormatError("encoding budget must be >= 1");
}

std::string cell_key_text(const CellPair& pair) {
    return pair.column_name + ": " + pair.value;
}

std::vector<EmbeddingVector> encode_in_batches(const Encoder& encoder, const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out(texts.size());
    if (texts.empty()) return out;
    std::size_t n_batches = (texts.size() + kEncodeBatchSize - 1) / kEncodeBatchSize;
    auto run = [&](std::size_t b) {
        auto begin = b * kEncodeBatchSize;
        auto end = std::min(texts.size(), begin + kEncodeBatchSize);
        auto vecs = encoder.embed_batch(std::span<const std::string>(texts).subspan(begin, end - begin));
        std::move(vecs.begin(), vecs.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
    };
    std::size_t workers = std::min(n_batches, std::max<std::size_t>(1, encoder.max_concurrency()));
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_batches; ++b) run(b);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&] {
            for (std::size_t b = next++; b < n_batches; b = next++) run(b);
        }));
    }
    for (auto& f : futures) f.get();
    return out;
}

SchemaIndex build_schema_db(const Table& table, const Encoder& encoder) {
    auto schemas = build_schema(table);
    auto keys = table.column_names();
    auto vectors = encode_in_batches(encoder, keys);
    return {encoder.name(), SearchCorpus(encoder.dim(), std::move(keys), vectors), std::move(schemas)};
}

CellIndex build_cell_db(const Table& table, EncodingBudget budget, const Encoder& encoder) {
    auto pairs = distinct_pairs_by_freq(table);
    if (pairs.size() > budget.value) pairs.resize(budget.value);
    std::vector<std::string> keys;
    keys.reserve(pairs.size());
    for (const auto& p : pairs) keys.push_back(cell_key_text(p));
    auto vectors = encode_in_batches(encoder, keys);
    return {encoder.name(), SearchCorpus(encoder.dim(), std::move(keys), vectors), std::move(pairs)};
}

namespace {

constexpr char kMagic[8] = {'T', 'R', 'A', 'G', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kKindSchema = 0;
constexpr std::uint32_t kKindCell = 1;
constexpr std::size_t kHeaderBytes = 8 + 4 * 4 + 8 + 8;

template <typename T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t offset) {
    T value;
    std::memcpy(&value, bytes.data() + offset, sizeof(T));
    return value;
}

// Invalid UTF-8 in cells is replaced rather than rejected.
std::string dump_line(const nlohmann::json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

nlohmann::json payload_json(const ColumnSchema& s) {
    nlohmann::json j = {{"column_name", s.column_name},
                        {"dtype", std::string(dtype_name(s.dtype))},
                        {"null_count", s.null_count},
                        {"cell_examples", s.cell_examples}};
    if (s.min) j["min"] = *s.min;
    if (s.max) j["max"] = *s.max;
    return j;
}

nlohmann::json payload_json(const CellPair& p) {
    return {{"column_name", p.column_name}, {"value", p.value}, {"frequency", p.frequency}};
}

ColumnDType parse_dtype(const std::string& name) {
    for (auto d : {ColumnDType::integer, ColumnDType::floating, ColumnDType::datetime, ColumnDType::categorical}) {
        if (dtype_name(d) == name) return d;
    }
    throw FormatError("unknown dtype '" + name + "' in index payload");
}

void from_payload(const nlohmann::json& j, ColumnSchema& s) {
    s.column_name = j.at("column_name").get<std::string>();
    s.dtype = parse_dtype(j.at("dtype").get<std::string>());
    s.null_count = j.at("null_count").get<std::size_t>();
    s.cell_examples = j.at("cell_examples").get<std::vector<std::string>>();
    if (j.contains("min")) s.min = j.at("min").get<std::string>();
    if (j.contains("max")) s.max = j.at("max").get<std::string>();
}

void from_payload(const nlohmann::json& j, CellPair& p) {
    p.column_name = j.at("column_name").get<std::string>();
    p.value = j.at("value").get<std::string>();
    p.frequency = j.at("frequency").get<std::size_t>();
}

template <typename Payload>
void save_impl(const RetrievalIndex<Payload>& index, std::uint32_t kind, const std::filesystem::path& path) {
    std::string payload = dump_line(nlohmann::json{{"encoder", index.encoder_name}}) + "\n";
    for (std::size_t i = 0; i < index.size(); ++i) {
        auto j = payload_json(index.payloads[i]);
        j["key"] = index.corpus.key(i);
        payload += dump_line(j) + "\n";
    }
    std::string out(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kIndexFormatVersion);
    put<std::uint32_t>(out, kind);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(index.dim()));
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, index.size());
    put<std::uint64_t>(out, payload.size());
    out += payload;
    auto matrix = index.corpus.matrix();
    out.append(reinterpret_cast<const char*>(matrix.data()), matrix.size_bytes());
    write_file(path, out);
}

template <typename Payload>
RetrievalIndex<Payload> load_impl(const std::filesystem::path& path, std::uint32_t kind,
                                  std::optional<std::size_t> expected_dim) {
    auto bytes = read_file(path);
    std::string_view view(bytes);
    auto where = path.string();
    if (view.size() < kHeaderBytes || view.substr(0, 8) != std::string_view(kMagic, 8)) {
        throw FormatError(where + ": not an index file");
    }
    auto version = get<std::uint32_t>(view, 8);
    if (version != kIndexFormatVersion) throw FormatError(where + ": unsupported format version " + std::to_string(version));
    if (get<std::uint32_t>(view, 12) != kind) throw FormatError(where + ": index holds a different kind of corpus");
    std::size_t dim = get<std::uint32_t>(view, 16);
    auto count = get<std::uint64_t>(view, 24);
    auto payload_bytes = get<std::uint64_t>(view, 32);
    if (expected_dim && *expected_dim != dim) {
        throw DimMismatch(where + ": index dim " + std::to_string(dim) + ", expected " + std::to_string(*expected_dim));
    }
    auto vector_bytes = count * dim * sizeof(float);
    if (view.size() != kHeaderBytes + payload_bytes + vector_bytes) {
        throw FormatError(where + ": size does not match header (truncated or corrupt)");
    }

    RetrievalIndex<Payload> index;
    std::vector<std::string> keys;
    std::istringstream lines(std::string(view.substr(kHeaderBytes, payload_bytes)));
    std::string line;
    try {
        if (!std::getline(lines, line)) throw FormatError(where + ": missing metadata line");
        index.encoder_name = nlohmann::json::parse(line).at("encoder").get<std::string>();
        while (std::getline(lines, line)) {
            auto j = nlohmann::json::parse(line);
            Payload p;
            from_payload(j, p);
            keys.push_back(j.at("key").get<std::string>());
            index.payloads.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(where + ": bad payload: " + e.what());
    }
    if (keys.size() != count) throw FormatError(where + ": payload entry count does not match header");

    std::vector<EmbeddingVector> vectors(count, EmbeddingVector(dim));
    const char* base = view.data() + kHeaderBytes + payload_bytes;
    for (std::size_t i = 0; i < count; ++i) {
        std::memcpy(vectors[i].data(), base + i * dim * sizeof(float), dim * sizeof(float));
    }
    index.corpus = SearchCorpus(dim, std::move(keys), vectors);
    return index;
}

}  // namespace

void save_index(const SchemaIndex& index, const std::filesystem::path& path) { save_impl(index, kKindSchema, path); }
void save_index(const CellIndex& index, const std::filesystem::path& path) { save_impl(index, kKindCell, path); }

SchemaIndex load_schema_index(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
    return load_impl<ColumnSchema>(path, kKindSchema, expected_dim);
}

CellIndex load_cell_index(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
    return load_impl<CellPair>(path, kKindCell, expected_dim);
}

}  // namespace tablerag
