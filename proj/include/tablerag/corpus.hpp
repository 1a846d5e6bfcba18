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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tablerag/lm.hpp"
#include "tablerag/retrieval.hpp"
#include "tablerag/table.hpp"

namespace tablerag {

/// Cap on how many distinct (column, value) pairs get embedded.
struct EncodingBudget {
    std::size_t value = 10000;

    explicit EncodingBudget(std::size_t b = 10000);
};

inline constexpr std::size_t kEncodeBatchSize = 128;

/// Searchable keys plus the payload each key stands for.
template <typename Payload>
struct RetrievalIndex {
    std::string encoder_name;
    SearchCorpus corpus;
    std::vector<Payload> payloads;

    std::size_t size() const { return payloads.size(); }
    std::size_t dim() const { return corpus.dim(); }
};

/// One entry per column; only the column name is embedded.
using SchemaIndex = RetrievalIndex<ColumnSchema>;
/// The `budget` most frequent distinct pairs, keyed "column: value".
using CellIndex = RetrievalIndex<CellPair>;

std::string cell_key_text(const CellPair& pair);

/// Embeds `texts` in batches of kEncodeBatchSize, running up to
/// encoder.max_concurrency() batches at a time. Output order matches input.
std::vector<EmbeddingVector> encode_in_batches(const Encoder& encoder, const std::vector<std::string>& texts);

SchemaIndex build_schema_db(const Table& table, const Encoder& encoder);
CellIndex build_cell_db(const Table& table, EncodingBudget budget, const Encoder& encoder);

// Index files (format version 1), little-endian:
//   magic "TRAGIDX\0" | u32 version | u32 kind (0 schema, 1 cell) | u32 dim
//   | u32 reserved | u64 count | u64 payload_bytes
//   | payload: JSON lines, a metadata line then one line per entry
//   | count * dim float32 vectors
inline constexpr std::uint32_t kIndexFormatVersion = 1;

void save_index(const SchemaIndex& index, const std::filesystem::path& path);
void save_index(const CellIndex& index, const std::filesystem::path& path);

/// Throws IoError, FormatError (bad magic, version, kind or truncation) and
/// DimMismatch when `expected_dim` is given and differs from the file.
SchemaIndex load_schema_index(const std::filesystem::path& path, std::optional<std::size_t> expected_dim = {});
CellIndex load_cell_index(const std::filesystem::path& path, std::optional<std::size_t> expected_dim = {});

}  // namespace tablerag
