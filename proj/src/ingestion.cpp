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


#include "tablerag/ingestion.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

using Record = std::vector<std::string>;

// Splits CSV text into records. Returns records with their 1-based line
// numbers so errors can point at the source.
std::vector<std::pair<std::size_t, Record>> split_records(std::string_view csv) {
    std::vector<std::pair<std::size_t, Record>> records;
    Record record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_record = [&] {
        // A line with no characters at all is not a record.
        if (!(record.empty() && field.empty() && !field_started)) {
            record.push_back(std::move(field));
            records.emplace_back(record_line, std::move(record));
        }
        record.clear();
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < csv.size(); ++i) {
        char c = csv[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < csv.size() && csv[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                if (i + 1 < csv.size() && csv[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                end_record();
                record_line = ++line;
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) throw FormatError("unterminated quoted field starting on line " + std::to_string(record_line));
    end_record();
    return records;
}

std::vector<std::string> dedup_names(const Record& header) {
    std::unordered_set<std::string> used(header.begin(), header.end());
    std::unordered_set<std::string> taken;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        auto name = header[j];
        if (name.find_first_not_of(" \t") == std::string::npos) name = "column_" + std::to_string(j + 1);
        if (taken.insert(name).second) {
            names.push_back(name);
            continue;
        }
        for (std::size_t k = 2;; ++k) {
            auto candidate = name + "_" + std::to_string(k);
            if (!used.count(candidate) && taken.insert(candidate).second) {
                names.push_back(candidate);
                break;
            }
        }
    }
    return names;
}

bool needs_quotes(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

void write_field(std::ostream& out, const std::string& field) {
    if (!needs_quotes(field)) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

template <typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError(where + ": field \"" + key + "\" has the wrong type");
    }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("error writing " + path.string());
}

Table parse_table_csv(std::string_view csv, std::string title) {
    if (csv.substr(0, 3) == "\xEF\xBB\xBF") csv.remove_prefix(3);
    auto records = split_records(csv);
    if (records.empty()) throw FormatError("missing header row");

    const auto& header = records.front().second;
    auto names = dedup_names(header);
    std::vector<Column> columns(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        columns[j].name = names[j];
        columns[j].cells.reserve(records.size() - 1);
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& [line, rec] = records[r];
        if (rec.size() != names.size()) {
            throw FormatError("row " + std::to_string(r) + " (line " + std::to_string(line) + ") has " +
                              std::to_string(rec.size()) + " fields, header has " +
                              std::to_string(names.size()));
        }
        for (std::size_t j = 0; j < rec.size(); ++j) columns[j].cells.push_back(rec[j]);
    }
    return Table(std::move(title), std::move(columns));
}

Table load_table_csv(const std::filesystem::path& path, std::string title) {
    return parse_table_csv(read_file(path), std::move(title));
}

void write_table_csv(const Table& table, std::ostream& out) {
    auto write_row = [&](auto&& field_at) {
        if (table.n_cols() == 1 && field_at(0).empty()) {
            out << "\"\"\n";  // keeps a lone empty cell from reading as a blank line
            return;
        }
        for (std::size_t j = 0; j < table.n_cols(); ++j) {
            if (j) out << ',';
            write_field(out, field_at(j));
        }
        out << '\n';
    };
    write_row([&](std::size_t j) -> const std::string& { return table.column(j).name; });
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        write_row([&](std::size_t j) -> const std::string& { return table.cell(i, j); });
    }
}

void save_table_csv(const Table& table, const std::filesystem::path& path) {
    std::ostringstream ss;
    write_table_csv(table, ss);
    write_file(path, ss.str());
}

const ManifestTable& DatasetManifest::table(const std::string& table_id) const {
    for (const auto& t : tables) {
        if (t.table_id == table_id) return t;
    }
    throw DanglingReference("unknown table_id '" + table_id + "'");
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw FormatError("manifest must be a JSON object");

    DatasetManifest manifest;
    manifest.name = require<std::string>(doc, "name", "manifest");
    auto base = path.parent_path();

    auto tables = require<nlohmann::json>(doc, "tables", "manifest");
    if (!tables.is_array()) throw FormatError("manifest: \"tables\" must be an array");
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < tables.size(); ++i) {
        auto where = "tables[" + std::to_string(i) + "]";
        ManifestTable t;
        t.table_id = require<std::string>(tables[i], "table_id", where);
        t.title = require<std::string>(tables[i], "title", where);
        t.csv_path = base / require<std::string>(tables[i], "csv_path", where);
        if (!ids.insert(t.table_id).second) throw FormatError(where + ": duplicate table_id '" + t.table_id + "'");
        if (!std::filesystem::exists(t.csv_path)) throw IoError(where + ": missing CSV " + t.csv_path.string());
        manifest.tables.push_back(std::move(t));
    }

    auto instances = require<nlohmann::json>(doc, "instances", "manifest");
    if (!instances.is_array()) throw FormatError("manifest: \"instances\" must be an array");
    for (std::size_t i = 0; i < instances.size(); ++i) {
        auto where = "instances[" + std::to_string(i) + "]";
        const auto& obj = instances[i];
        QAInstance inst;
        inst.question = require<std::string>(obj, "question", where);
        inst.table_id = require<std::string>(obj, "table_id", where);
        inst.gold_answer = require<std::vector<std::string>>(obj, "gold_answer", where);
        if (inst.gold_answer.empty()) throw FormatError(where + ": gold_answer is empty");
        if (obj.contains("gold_columns")) {
            inst.gold_columns = require<std::vector<std::string>>(obj, "gold_columns", where);
        }
        if (obj.contains("gold_cells")) {
            auto cells = require<std::vector<std::vector<std::string>>>(obj, "gold_cells", where);
            std::vector<std::pair<std::string, std::string>> pairs;
            for (const auto& cell : cells) {
                if (cell.size() != 2) throw FormatError(where + ": gold_cells entries must be [column, value]");
                pairs.emplace_back(cell[0], cell[1]);
            }
            inst.gold_cells = std::move(pairs);
        }
        if (!ids.count(inst.table_id)) {
            throw DanglingReference(where + ": unknown table_id '" + inst.table_id + "'");
        }
        manifest.instances.push_back(std::move(inst));
    }
    return manifest;
}

}  // namespace tablerag
