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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tablerag/table.hpp"

namespace tablerag {

/// Parses RFC-4180 CSV text with a header row. A UTF-8 byte-order mark is
/// dropped, completely empty lines are skipped, and repeated header names get
/// "_2", "_3", ... suffixes. Throws FormatError on a missing header, an
/// unterminated quote or a row whose field count differs from the header.
Table parse_table_csv(std::string_view csv, std::string title);

/// Reads and parses a CSV file. Throws IoError if it cannot be read.
Table load_table_csv(const std::filesystem::path& path, std::string title);

/// Writes the table as CSV, quoting only where needed, so that
/// parse_table_csv(write) reproduces every cell.
void write_table_csv(const Table& table, std::ostream& out);
void save_table_csv(const Table& table, const std::filesystem::path& path);

struct QAInstance {
    std::string question;
    std::string table_id;
    std::vector<std::string> gold_answer;
    std::optional<std::vector<std::string>> gold_columns;
    std::optional<std::vector<std::pair<std::string, std::string>>> gold_cells;
};

struct ManifestTable {
    std::string table_id;
    std::string title;
    std::filesystem::path csv_path;  // resolved against the manifest's directory
};

struct DatasetManifest {
    std::string name;
    std::vector<ManifestTable> tables;
    std::vector<QAInstance> instances;

    const ManifestTable& table(const std::string& table_id) const;
};

/// Loads and validates a manifest:
///   {"name", "tables": [{"table_id","title","csv_path"}],
///    "instances": [{"question","table_id","gold_answer",
///                   "gold_columns"?, "gold_cells"?}]}
/// Throws FormatError (schema), IoError (manifest or CSV missing) or
/// DanglingReference (unknown table_id).
DatasetManifest load_manifest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tablerag
