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
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tablerag/table.hpp"

namespace tablerag {

/// Where each original row and column landed in the expanded table.
struct PositionMap {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;

    friend bool operator==(const PositionMap&, const PositionMap&) = default;
};

struct ExpandedTable {
    Table table;
    PositionMap map;
};

/// Grows `table` to target_rows x target_cols. Original columns keep their
/// names; filler columns are "extra_<i>" with small seeded value pools
/// (integers, decimals, dates or category words). Filler rows reuse each
/// original column's own values, never a (column, value) pair listed in
/// `gold_cells`; a column with nothing else to offer gets empty cells.
/// Throws InvalidTarget when a target is smaller than the source.
ExpandedTable expand_table_synthetic(const Table& table, std::size_t target_rows, std::size_t target_cols,
                                     std::uint64_t seed,
                                     std::span<const std::pair<std::string, std::string>> gold_cells = {});

/// {"rows": [...], "cols": [...]}
std::string position_map_json(const PositionMap& map);

}  // namespace tablerag
