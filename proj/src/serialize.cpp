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

#include "signaldb/serialize.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "signaldb/ingestion.hpp"

namespace signaldb {

namespace {

nlohmann::json cell_json(const Value& v) {
  if (v.is_null()) return nullptr;
  switch (v.type()) {
    case ScalarType::Boolean: return v.as_bool();
    case ScalarType::Number: return v.as_number();
    case ScalarType::String: return v.as_string();
    case ScalarType::Timestamp:
    case ScalarType::Duration: return v.as_int();
  }
  return nullptr;
}

}  // namespace

std::string cell_text(const Value& v) {
  if (v.is_null()) return "";
  switch (v.type()) {
    case ScalarType::Boolean: return v.as_bool() ? "true" : "false";
    case ScalarType::String: return v.as_string();
    case ScalarType::Timestamp:
    case ScalarType::Duration: return std::to_string(v.as_int());
    case ScalarType::Number: return v.to_string();
  }
  return "";
}

nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : table.columns) {
    columns.push_back({{"name", c.name}, {"type", std::string(type_name(c.type))}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : table.columns) row.push_back(cell_json(c.cells[r]));
    rows.push_back(std::move(row));
  }
  nlohmann::json out;
  out["columns"] = std::move(columns);
  out["rows"] = std::move(rows);
  return out;
}

std::string to_json_string(const ResultTable& table) { return to_json(table).dump(); }

nlohmann::json to_json(const Diagnostic& diag) {
  return {{"error",
           {{"code", std::string(error_code_name(diag.code))},
            {"message", diag.message},
            {"span", {{"begin", diag.span.begin}, {"end", diag.span.end}}}}}};
}

std::string to_csv(const ResultTable& table, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += delimiter;
    out += ingest::csv_escape(table.columns[i].name, delimiter, false);
  }
  out += '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out += delimiter;
      const Value& v = table.columns[i].cells[r];
      out += ingest::csv_escape(cell_text(v), delimiter, v.is_null());
    }
    out += '\n';
  }
  return out;
}

std::string to_text_table(const ResultTable& table) {
  const std::size_t rows = table.row_count();
  std::vector<std::size_t> width;
  for (const auto& c : table.columns) {
    std::size_t w = c.name.size();
    for (const auto& v : c.cells) w = std::max(w, v.is_null() ? 4 : cell_text(v).size());
    width.push_back(w);
  }
  std::string out;
  auto rule = [&] {
    for (auto w : width) out += "+" + std::string(w + 2, '-');
    out += "+\n";
  };
  if (!table.columns.empty()) {
    rule();
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += fmt::format("| {:<{}} ", table.columns[i].name, width[i]);
    out += "|\n";
    rule();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t i = 0; i < table.columns.size(); ++i) {
        const Value& v = table.columns[i].cells[r];
        std::string text = v.is_null() ? "NULL" : cell_text(v);
        bool right = v.type() == ScalarType::Number || is_temporal(v.type());
        out += right ? fmt::format("| {:>{}} ", text, width[i]) : fmt::format("| {:<{}} ", text, width[i]);
      }
      out += "|\n";
    }
    rule();
  }
  out += fmt::format("({} row{})\n", rows, rows == 1 ? "" : "s");
  return out;
}

}  // namespace signaldb
