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

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "signaldb/engine.hpp"
#include "signaldb/result_table.hpp"
#include "signaldb/store.hpp"

namespace signaldb::api {

enum class OutputFormat { Table, Csv, Json };

/// Accepts "table", "csv" and "json" in any case.
std::optional<OutputFormat> parse_format(std::string_view name);
std::string_view format_name(OutputFormat format);
std::string render(const ResultTable& table, OutputFormat format);

struct Session {
  std::shared_ptr<Engine> engine = std::make_shared<Engine>();
  std::optional<std::string> current_log;
  OutputFormat format = OutputFormat::Table;
};

enum class SourceKind { Csv, Tsv, Xes };

/// Chosen by file extension (.csv, .tsv, .xes). Nullopt otherwise.
std::optional<SourceKind> source_kind(std::string_view path);
std::string_view source_extension(SourceKind kind);

/// Parses `content` as the given kind. `config` is the CSV ingest config
/// (ignored for XES); TSV defaults its delimiter to a tab.
store::EventLogPtr load_log(const std::string& content, SourceKind kind, const nlohmann::json& config,
                            const std::string& log_id);

/// Parsed `<stem>.json` next to `path`, or null when there is none. Throws
/// InvalidConfig for malformed JSON.
nlohmann::json side_config(const std::string& path);

/// Loads a file. Without an explicit config, `<stem>.json` next to the file is
/// used when it exists. Throws IoError for unreadable files or unknown
/// extensions.
store::EventLogPtr load_log_file(const std::string& path, const std::string& log_id,
                                 const std::optional<nlohmann::json>& config = std::nullopt);

/// Log ids usable as file stems: [A-Za-z0-9_.-]+, not starting with '.'.
bool is_valid_log_id(std::string_view id);

/// Writes `<dir>/<log_id>.<ext>` and, for CSV/TSV, `<dir>/<log_id>.json`.
void persist_log(const std::string& dir, const std::string& log_id, SourceKind kind, const std::string& content,
                 const nlohmann::json& config);
/// Removes the files written by persist_log. Missing files are ignored.
void unpersist_log(const std::string& dir, const std::string& log_id);

/// Registers every .csv/.tsv/.xes file in `dir` under its stem. Returns the
/// ids loaded, sorted. A missing directory loads nothing.
std::vector<std::string> load_data_dir(store::Catalog& catalog, const std::string& dir);

std::string describe_schema(const store::Schema& schema);
std::string describe_logs(const store::Catalog& catalog);

/// Runs one statement: a query or a meta-command (\open, \logs, \schema,
/// \format, \quit). Results go to `out`, diagnostics to `err`. Returns false
/// on failure. Sets `quit` on \quit.
bool execute_statement(Session& session, std::string_view statement, std::ostream& out, std::ostream& err,
                       bool* quit = nullptr);

/// Offset one past the last top-level ';' in `text`, ignoring semicolons in
/// strings, quoted identifiers and comments.
std::optional<std::size_t> last_statement_end(std::string_view text);

/// Reads statements terminated by ';' until EOF or \quit. Meta-commands are
/// also accepted on a line of their own without ';'. Errors are rendered and
/// the loop continues. Always returns 0.
int repl_loop(Session& session, std::istream& in, std::ostream& out, std::ostream& err, bool interactive = false);

/// Runs every statement in order. Returns 0 when all succeed; stops at the
/// first failure with its diagnostic on `err` and returns 1.
int run_batch(Session& session, std::string_view script, std::ostream& out, std::ostream& err);

}  // namespace signaldb::api
