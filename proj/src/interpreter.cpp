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


#include "tablerag/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "tablerag/text.hpp"

namespace tablerag {

bool FrameColumn::is_null(std::size_t row) const {
    if (dtype == ColumnDType::categorical) return text[row].empty();
    return !numbers[row].has_value();
}

std::string FrameColumn::render(std::size_t row) const {
    if (is_null(row)) return "";
    if (dtype == ColumnDType::integer || dtype == ColumnDType::floating) return text::format_number(*numbers[row]);
    return text[row];
}

const FrameColumn* Frame::find(std::string_view name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

Frame Frame::take_rows(const std::vector<std::size_t>& rows) const {
    Frame out;
    out.n_rows = rows.size();
    for (const auto& c : columns) {
        FrameColumn col{c.name, c.dtype, {}, {}};
        col.text.reserve(rows.size());
        for (auto r : rows) col.text.push_back(c.text[r]);
        if (!c.numbers.empty()) {
            col.numbers.reserve(rows.size());
            for (auto r : rows) col.numbers.push_back(c.numbers[r]);
        }
        out.columns.push_back(std::move(col));
    }
    return out;
}

Frame make_frame(const Table& table) {
    Frame frame;
    frame.n_rows = table.n_rows();
    for (const auto& src : table.columns()) {
        FrameColumn col{src.name, infer_column_type(src.cells), {}, {}};
        col.text.reserve(src.cells.size());
        for (const auto& raw : src.cells) {
            col.text.emplace_back(text::is_null_marker(raw) ? std::string_view{} : text::trim(raw));
        }
        if (col.dtype != ColumnDType::categorical) {
            col.numbers.reserve(src.cells.size());
            for (const auto& t : col.text) {
                if (t.empty()) {
                    col.numbers.emplace_back();
                } else if (col.dtype == ColumnDType::datetime) {
                    col.numbers.push_back(text::parse_iso_datetime(t));
                } else {
                    col.numbers.push_back(text::parse_decimal(t));
                }
            }
        }
        frame.columns.push_back(std::move(col));
    }
    return frame;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string render_frame(const Frame& frame, std::size_t max_rows) {
    std::vector<std::string> names;
    for (const auto& c : frame.columns) names.push_back(c.name);
    if (frame.n_rows == 0) return "Empty table\nColumns: " + text::join(names, ", ");

    std::ostringstream out;
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << csv_field(names[j]);
    out << '\n';
    for (std::size_t i = 0; i < frame.n_rows && i < max_rows; ++i) {
        for (std::size_t j = 0; j < frame.columns.size(); ++j) {
            out << (j ? "," : "") << csv_field(frame.columns[j].render(i));
        }
        out << '\n';
    }
    out << '[' << frame.n_rows << " rows x " << frame.columns.size() << " columns]";
    return out.str();
}

namespace {

struct EvalError {
    std::string reason;
};

struct Arg {
    std::string value;
    bool quoted = false;
};

struct Stage {
    std::string op;
    std::vector<Arg> args;
};

// Splits on `sep` outside single or double quotes (backslash escapes honoured).
std::vector<std::string> split_top(std::string_view s, std::string_view sep) {
    std::vector<std::string> parts;
    std::string current;
    char quote = 0;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            current.push_back(c);
            if (c == '\\' && i + 1 < s.size()) {
                current.push_back(s[++i]);
            } else if (c == quote) {
                quote = 0;
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '(' || c == '[') {
            ++depth;
        } else if (c == ')' || c == ']') {
            --depth;
        } else if (depth == 0 && s.substr(i, sep.size()) == sep) {
            parts.push_back(std::move(current));
            current.clear();
            i += sep.size() - 1;
            continue;
        }
        current.push_back(c);
    }
    if (quote) throw EvalError{"unterminated quote"};
    parts.push_back(std::move(current));
    return parts;
}

Arg parse_arg(std::string_view raw) {
    auto t = text::trim(raw);
    if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front()) {
        std::string out;
        for (std::size_t i = 1; i + 1 < t.size(); ++i) {
            if (t[i] == '\\' && i + 2 < t.size()) ++i;
            out.push_back(t[i]);
        }
        return {out, true};
    }
    return {std::string(t), false};
}

Stage parse_stage(std::string_view raw) {
    auto t = text::trim(raw);
    if (t == "df") return {"df", {}};
    auto open = t.find('(');
    if (open == std::string_view::npos || t.back() != ')') {
        throw EvalError{"cannot parse '" + std::string(t) + "', expected op(args)"};
    }
    Stage stage{text::to_lower(text::trim(t.substr(0, open))), {}};
    auto inner = text::trim(t.substr(open + 1, t.size() - open - 2));
    if (inner.empty()) return stage;
    // project([a, b]) is accepted as project(a, b)
    if (inner.front() == '[' && inner.back() == ']') inner = inner.substr(1, inner.size() - 2);
    for (const auto& part : split_top(inner, ",")) stage.args.push_back(parse_arg(part));
    return stage;
}

void expect_args(const Stage& s, std::size_t n) {
    if (s.args.size() != n) {
        throw EvalError{s.op + " expects " + std::to_string(n) + " argument" + (n == 1 ? "" : "s") + ", got " +
                        std::to_string(s.args.size())};
    }
}

std::size_t column_index(const Frame& f, const std::string& name) {
    for (std::size_t j = 0; j < f.columns.size(); ++j) {
        if (f.columns[j].name == name) return j;
    }
    throw EvalError{"unknown column '" + name + "'"};
}

bool numeric(ColumnDType d) { return d == ColumnDType::integer || d == ColumnDType::floating; }

std::string strip_number_decoration(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c == '$' || c == ',' || c == ' ') continue;
        // UTF-8 euro, pound and yen signs
        if (c == 0xE2 && s.substr(i, 3) == "\xE2\x82\xAC") { i += 2; continue; }
        if (c == 0xC2 && (s.substr(i, 2) == "\xC2\xA3" || s.substr(i, 2) == "\xC2\xA5")) { ++i; continue; }
        out.push_back(s[i]);
    }
    return out;
}

ColumnDType parse_cast_type(const std::string& name) {
    auto n = text::to_lower(name);
    if (n == "int" || n == "integer" || n == "int64") return ColumnDType::integer;
    if (n == "float" || n == "float64" || n == "double") return ColumnDType::floating;
    if (n == "datetime" || n == "date" || n == "datetime64") return ColumnDType::datetime;
    if (n == "str" || n == "string" || n == "object" || n == "categorical") return ColumnDType::categorical;
    throw EvalError{"unknown dtype '" + name + "'"};
}

// Casts in place; leaves the column untouched on failure.
void cast_column(FrameColumn& col, ColumnDType to) {
    std::vector<std::optional<double>> numbers;
    if (to != ColumnDType::categorical) {
        numbers.reserve(col.text.size());
        for (std::size_t i = 0; i < col.text.size(); ++i) {
            if (col.text[i].empty()) {
                numbers.emplace_back();
                continue;
            }
            std::optional<double> v;
            if (to == ColumnDType::datetime) {
                v = text::parse_iso_datetime(col.text[i]);
            } else {
                v = text::parse_decimal(strip_number_decoration(col.text[i]));
                if (v && to == ColumnDType::integer && std::trunc(*v) != *v) v.reset();
            }
            if (!v) {
                throw EvalError{"cannot cast value '" + col.text[i] + "' in column '" + col.name + "' to " +
                                std::string(dtype_name(to))};
            }
            numbers.push_back(v);
        }
    }
    col.dtype = to;
    col.numbers = std::move(numbers);
}

bool compare(double a, double b, const std::string& op) {
    if (op == "==") return a == b;
    if (op == "!=") return a != b;
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    return a >= b;
}

bool compare(const std::string& a, const std::string& b, const std::string& op) {
    if (op == "==") return a == b;
    if (op == "!=") return a != b;
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    return a >= b;
}

Frame apply_filter(const Frame& f, const Stage& s) {
    expect_args(s, 3);
    const auto& col = f.columns[column_index(f, s.args[0].value)];
    auto op = s.args[1].value;
    if (op == "=") op = "==";
    static const std::unordered_set<std::string> kOps = {"==", "!=", "<", "<=", ">", ">="};
    if (!kOps.count(op)) throw EvalError{"unknown comparison '" + op + "'"};
    const auto& literal = s.args[2].value;

    std::vector<std::size_t> keep;
    if (col.dtype == ColumnDType::categorical) {
        for (std::size_t i = 0; i < f.n_rows; ++i) {
            if (!col.is_null(i) && compare(col.text[i], literal, op)) keep.push_back(i);
        }
        return f.take_rows(keep);
    }
    std::optional<double> rhs = col.dtype == ColumnDType::datetime
                                    ? text::parse_iso_datetime(literal)
                                    : text::parse_decimal(strip_number_decoration(literal));
    if (!rhs) throw EvalError{"value '" + literal + "' does not match the " + std::string(dtype_name(col.dtype)) +
                              " column '" + col.name + "'"};
    for (std::size_t i = 0; i < f.n_rows; ++i) {
        if (col.numbers[i] && compare(*col.numbers[i], *rhs, op)) keep.push_back(i);
    }
    return f.take_rows(keep);
}

Frame apply_contains(const Frame& f, const Stage& s) {
    expect_args(s, 2);
    const auto& col = f.columns[column_index(f, s.args[0].value)];
    auto needle = text::to_lower(s.args[1].value);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < f.n_rows; ++i) {
        if (!col.is_null(i) && text::to_lower(col.text[i]).find(needle) != std::string::npos) keep.push_back(i);
    }
    return f.take_rows(keep);
}

Frame apply_project(const Frame& f, const Stage& s) {
    if (s.args.empty()) throw EvalError{"project expects at least one column"};
    Frame out;
    out.n_rows = f.n_rows;
    for (const auto& a : s.args) out.columns.push_back(f.columns[column_index(f, a.value)]);
    return out;
}

Frame apply_sort(const Frame& f, const Stage& s) {
    if (s.args.empty() || s.args.size() > 2) throw EvalError{"sort expects (column, asc|desc)"};
    const auto& col = f.columns[column_index(f, s.args[0].value)];
    bool desc = false;
    if (s.args.size() == 2) {
        auto dir = text::to_lower(s.args[1].value);
        if (dir == "desc" || dir == "descending") {
            desc = true;
        } else if (dir != "asc" && dir != "ascending") {
            throw EvalError{"sort direction must be asc or desc"};
        }
    }
    std::vector<std::size_t> rows(f.n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        bool na = col.is_null(a), nb = col.is_null(b);
        if (na || nb) return !na && nb;
        if (col.dtype == ColumnDType::categorical) return desc ? col.text[b] < col.text[a] : col.text[a] < col.text[b];
        return desc ? *col.numbers[b] < *col.numbers[a] : *col.numbers[a] < *col.numbers[b];
    });
    return f.take_rows(rows);
}

Frame apply_head(const Frame& f, const Stage& s) {
    expect_args(s, 1);
    auto n = text::parse_int64(s.args[0].value);
    if (!n || *n < 0) throw EvalError{"head expects a non-negative integer"};
    std::vector<std::size_t> rows(std::min<std::size_t>(f.n_rows, static_cast<std::size_t>(*n)));
    std::iota(rows.begin(), rows.end(), 0);
    return f.take_rows(rows);
}

Frame apply_distinct(const Frame& f, const Stage& s) {
    expect_args(s, 1);
    auto j = column_index(f, s.args[0].value);
    const auto& col = f.columns[j];
    std::unordered_set<std::string> seen;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < f.n_rows; ++i) {
        if (!col.is_null(i) && seen.insert(col.render(i)).second) rows.push_back(i);
    }
    Frame one;
    one.n_rows = f.n_rows;
    one.columns.push_back(col);
    return one.take_rows(rows);
}

std::string apply_agg(const Frame& f, const Stage& s) {
    expect_args(s, 2);
    const auto& col = f.columns[column_index(f, s.args[0].value)];
    auto fn = text::to_lower(s.args[1].value);
    if (fn == "count") {
        std::size_t n = 0;
        for (std::size_t i = 0; i < f.n_rows; ++i) n += col.is_null(i) ? 0 : 1;
        return std::to_string(n);
    }
    if (fn != "mean" && fn != "sum" && fn != "min" && fn != "max") throw EvalError{"unknown aggregate '" + fn + "'"};
    bool date_extreme = col.dtype == ColumnDType::datetime && (fn == "min" || fn == "max");
    if (!numeric(col.dtype) && !date_extreme) throw EvalError{"column not numeric"};

    std::optional<std::size_t> best;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < f.n_rows; ++i) {
        if (!col.numbers[i]) continue;
        double v = *col.numbers[i];
        sum += v;
        ++n;
        if (!best || (fn == "min" ? v < *col.numbers[*best] : v > *col.numbers[*best])) best = i;
    }
    if (fn == "sum") return text::format_number(sum);
    if (n == 0) return "nan";
    if (fn == "mean") return text::format_number(sum / static_cast<double>(n));
    return col.render(*best);
}

}  // namespace

TableEnv::TableEnv(const Table& table) : frame_(make_frame(table)) {}

std::string TableEnv::execute(std::string_view action) {
    try {
        auto trimmed = text::trim(action);
        if (trimmed.empty()) throw EvalError{"empty action"};
        auto pieces = split_top(trimmed, "|>");
        std::vector<Stage> stages;
        for (const auto& p : pieces) stages.push_back(parse_stage(p));

        // Casts are validated on the environment first so a failing cast
        // changes nothing.
        Frame env = frame_;
        Frame work = frame_;
        bool only_casts = true;
        for (std::size_t k = 0; k < stages.size(); ++k) {
            const auto& s = stages[k];
            if (s.op == "df") continue;
            if (s.op == "agg") {
                if (k + 1 != stages.size()) throw EvalError{"agg must be the last operation"};
                auto result = apply_agg(work, s);
                frame_ = std::move(env);
                return result;
            }
            if (s.op == "cast") {
                expect_args(s, 2);
                auto to = parse_cast_type(s.args[1].value);
                cast_column(env.columns[column_index(env, s.args[0].value)], to);
                cast_column(work.columns[column_index(work, s.args[0].value)], to);
                continue;
            }
            only_casts = false;
            if (s.op == "filter") work = apply_filter(work, s);
            else if (s.op == "contains") work = apply_contains(work, s);
            else if (s.op == "project") work = apply_project(work, s);
            else if (s.op == "sort") work = apply_sort(work, s);
            else if (s.op == "head") work = apply_head(work, s);
            else if (s.op == "distinct") work = apply_distinct(work, s);
            else throw EvalError{"unknown operation '" + s.op + "'"};
        }
        frame_ = std::move(env);
        return only_casts ? "success!" : render_frame(work);
    } catch (const EvalError& e) {
        return "Error: " + e.reason;
    } catch (const std::exception& e) {
        return std::string("Error: ") + e.what();
    }
}

std::string interpret_action(const Table& table, std::string_view action) {
    TableEnv env(table);
    return env.execute(action);
}

}  // namespace tablerag
