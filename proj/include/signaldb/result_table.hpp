// Copyright 2026 The signaldb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "signaldb/value.hpp"

namespace signaldb {

struct ResultColumn {
  std::string name;
  ScalarType type = ScalarType::String;
  std::vector<Value> cells;

  friend bool operator==(const ResultColumn&, const ResultColumn&) = default;
};

/// Flat, typed, column-major query output. Every cell's type equals its
/// column's declared type; NULL cells are explicit.
struct ResultTable {
  std::vector<ResultColumn> columns;

  std::size_t row_count() const { return columns.empty() ? rows_without_columns : columns.front().cells.size(); }
  std::size_t column_count() const { return columns.size(); }
  const Value& at(std::size_t row, std::size_t col) const { return columns[col].cells[row]; }

  // Only meaningful for a table with zero columns.
  std::size_t rows_without_columns = 0;

  friend bool operator==(const ResultTable& a, const ResultTable& b) {
    return a.columns == b.columns && (!a.columns.empty() || a.rows_without_columns == b.rows_without_columns);
  }
};

}  // namespace signaldb
