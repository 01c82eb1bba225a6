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

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "signaldb/store.hpp"

namespace signaldb::ingest {

enum class ColumnRole { CaseId, EventName, EndTime, StartTime, Attribute };

/// How a delimited file maps onto the case/event model.
///
/// Columns named case_id, event_name, end_time or start_time (any case) take
/// that role unless `column_roles` says otherwise. `timestamp_format` is
/// "auto" (decided per column from its first value), "epoch_millis",
/// "iso8601", or a pattern understood by ts::parse_with_pattern.
struct CsvIngestConfig {
  char delimiter = ',';
  std::map<std::string, ColumnRole> column_roles;
  std::string timestamp_format = "auto";
  std::map<std::string, store::Level> level_overrides;
  std::map<std::string, ScalarType> type_overrides;

  /// Wire form (all keys optional):
  ///   {"delimiter": ",", "timestamp_format": "epoch_millis",
  ///    "case_id": "<col>", "event_name": "<col>", "end_time": "<col>", "start_time": "<col>",
  ///    "levels": {"<col>": "case"|"event"}, "types": {"<col>": "Number", ...}}
  /// Throws InvalidConfig.
  static CsvIngestConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// One parsed CSV field. An unquoted empty field is NULL; a quoted empty
/// field is the empty string.
struct CsvField {
  std::string text;
  bool quoted = false;

  bool is_null() const { return text.empty() && !quoted; }
};

using CsvRecord = std::vector<CsvField>;

/// RFC-4180 reader: quoted fields may contain delimiters, doubled quotes and
/// line breaks; CRLF and LF both end a record.
std::vector<CsvRecord> read_csv_records(std::istream& in, char delimiter);

/// Writes one field, quoting when needed. NULL is written as an empty
/// unquoted field, the empty string as `""`.
std::string csv_escape(std::string_view text, char delimiter, bool is_null);

/// Resolves each column's level: the override when present, otherwise
/// case-level iff the column's raw value (NULL included) is constant within
/// every case. `cases` lists the record indices of each case.
std::vector<store::Level> infer_attribute_levels(const std::vector<CsvRecord>& records,
                                                 const std::vector<std::vector<std::size_t>>& cases,
                                                 const std::vector<std::optional<store::Level>>& overrides);

store::EventLogPtr ingest_csv(std::istream& in, const CsvIngestConfig& config, const std::string& log_id);
store::EventLogPtr ingest_csv_file(const std::string& path, const CsvIngestConfig& config,
                                   const std::string& log_id);

/// Minimal XES import: traces become cases (concept:name → case_id), events
/// take concept:name → event_name and time:timestamp → end_time; other
/// string/int/float/boolean/date attributes are kept as plain attributes.
store::EventLogPtr ingest_xes(std::istream& in, const std::string& log_id);
store::EventLogPtr ingest_xes_file(const std::string& path, const std::string& log_id);

}  // namespace signaldb::ingest
