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

#include <string>

#include <json.hpp>

#include "signaldb/error.hpp"
#include "signaldb/result_table.hpp"

namespace signaldb {

/// {"columns": [{"name", "type"}], "rows": [[cell, ...]]}. Timestamps and
/// durations are integer milliseconds, numbers are doubles, NULL is null.
nlohmann::json to_json(const ResultTable& table);
std::string to_json_string(const ResultTable& table);

/// {"error": {"code", "message", "span": {"begin", "end"}}}
nlohmann::json to_json(const Diagnostic& diag);

/// Header row plus one record per row, quoted like the CSV reader expects.
/// NULL is an empty unquoted field.
std::string to_csv(const ResultTable& table, char delimiter = ',');

/// Aligned text table with a trailing row count.
std::string to_text_table(const ResultTable& table);

/// Cell text used by the CSV and text renderers.
std::string cell_text(const Value& v);

}  // namespace signaldb
