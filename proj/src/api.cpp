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

#include "signaldb/api.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "signaldb/ingestion.hpp"
#include "signaldb/parser.hpp"
#include "signaldb/serialize.hpp"

namespace signaldb::api {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

// Drops leading whitespace and `--` comment lines.
std::string_view skip_comments(std::string_view s) {
  for (;;) {
    s = trim(s);
    if (s.rfind("--", 0) != 0) return s;
    auto nl = s.find('\n');
    if (nl == std::string_view::npos) return {};
    s.remove_prefix(nl + 1);
  }
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
}

void print_error(std::ostream& err, const Diagnostic& diag, std::string_view source) {
  err << render_diagnostic(diag, source) << '\n';
}

bool run_meta(Session& session, std::string_view text, std::ostream& out, std::ostream& err, bool* quit) {
  while (!text.empty() && (text.back() == ';' || std::isspace(static_cast<unsigned char>(text.back())))) {
    text.remove_suffix(1);
  }
  auto args = words(text);
  const std::string cmd = store::to_lower(args.front());
  auto fail = [&](ErrorCode code, std::string message) {
    print_error(err, {code, std::move(message), {}}, text);
    return false;
  };
  if (cmd == "\\quit" || cmd == "\\q") {
    if (quit) *quit = true;
    return true;
  }
  if (cmd == "\\open") {
    if (args.size() != 2) return fail(ErrorCode::SyntaxError, "usage: \\open <log_id>");
    if (!session.engine->catalog().find(args[1])) {
      return fail(ErrorCode::UnknownLog, fmt::format("unknown log '{}'", args[1]));
    }
    session.current_log = args[1];
    out << "current log: " << args[1] << '\n';
    return true;
  }
  if (cmd == "\\logs") {
    out << describe_logs(session.engine->catalog());
    return true;
  }
  if (cmd == "\\schema") {
    std::optional<std::string> id = args.size() > 1 ? std::optional<std::string>(args[1]) : session.current_log;
    if (!id) return fail(ErrorCode::NoCurrentProcess, "no current log; use \\open <log_id> or \\schema <log_id>");
    auto log = session.engine->catalog().find(*id);
    if (!log) return fail(ErrorCode::UnknownLog, fmt::format("unknown log '{}'", *id));
    out << describe_schema(log->schema());
    return true;
  }
  if (cmd == "\\format") {
    if (args.size() == 1) {
      out << "format: " << format_name(session.format) << '\n';
      return true;
    }
    auto f = parse_format(args[1]);
    if (!f || args.size() != 2) return fail(ErrorCode::InvalidRequest, "format must be table, csv or json");
    session.format = *f;
    out << "format: " << format_name(*f) << '\n';
    return true;
  }
  return fail(ErrorCode::SyntaxError, fmt::format("unknown meta-command '{}'", args.front()));
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view name) {
  if (store::iequals(name, "table")) return OutputFormat::Table;
  if (store::iequals(name, "csv")) return OutputFormat::Csv;
  if (store::iequals(name, "json")) return OutputFormat::Json;
  return std::nullopt;
}

std::string_view format_name(OutputFormat format) {
  switch (format) {
    case OutputFormat::Table: return "table";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
  }
  return "table";
}

std::string render(const ResultTable& table, OutputFormat format) {
  switch (format) {
    case OutputFormat::Table: return to_text_table(table);
    case OutputFormat::Csv: return to_csv(table);
    case OutputFormat::Json: return to_json_string(table) + "\n";
  }
  return {};
}

std::optional<SourceKind> source_kind(std::string_view path) {
  const std::string ext = store::to_lower(fs::path(std::string(path)).extension().string());
  if (ext == ".csv") return SourceKind::Csv;
  if (ext == ".tsv") return SourceKind::Tsv;
  if (ext == ".xes") return SourceKind::Xes;
  return std::nullopt;
}

std::string_view source_extension(SourceKind kind) {
  switch (kind) {
    case SourceKind::Csv: return ".csv";
    case SourceKind::Tsv: return ".tsv";
    case SourceKind::Xes: return ".xes";
  }
  return ".csv";
}

store::EventLogPtr load_log(const std::string& content, SourceKind kind, const nlohmann::json& config,
                            const std::string& log_id) {
  std::istringstream in(content);
  if (kind == SourceKind::Xes) return ingest::ingest_xes(in, log_id);
  const nlohmann::json& cfg_json = config.is_null() ? nlohmann::json::object() : config;
  auto cfg = ingest::CsvIngestConfig::from_json(cfg_json);
  if (kind == SourceKind::Tsv && !cfg_json.contains("delimiter")) cfg.delimiter = '\t';
  return ingest::ingest_csv(in, cfg, log_id);
}

nlohmann::json side_config(const std::string& path) {
  fs::path side = fs::path(path).replace_extension(".json");
  if (!fs::exists(side)) return nullptr;
  try {
    return nlohmann::json::parse(read_file(side.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("'{}': {}", side.string(), e.what()));
  }
}

store::EventLogPtr load_log_file(const std::string& path, const std::string& log_id,
                                 const std::optional<nlohmann::json>& config) {
  auto kind = source_kind(path);
  if (!kind) throw Error(ErrorCode::IoError, fmt::format("'{}' is not a .csv, .tsv or .xes file", path));
  nlohmann::json cfg = config ? *config : side_config(path);
  return load_log(read_file(path), *kind, cfg, log_id);
}

bool is_valid_log_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

void persist_log(const std::string& dir, const std::string& log_id, SourceKind kind, const std::string& content,
                 const nlohmann::json& config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot create '{}': {}", dir, ec.message()));
  unpersist_log(dir, log_id);
  const fs::path base = fs::path(dir) / log_id;
  write_file(fs::path(base).concat(source_extension(kind)), content);
  if (kind != SourceKind::Xes && !config.is_null()) write_file(fs::path(base).concat(".json"), config.dump(2));
}

void unpersist_log(const std::string& dir, const std::string& log_id) {
  const fs::path base = fs::path(dir) / log_id;
  for (const char* ext : {".csv", ".tsv", ".xes", ".json"}) {
    std::error_code ec;
    fs::remove(fs::path(base).concat(ext), ec);
  }
}

std::vector<std::string> load_data_dir(store::Catalog& catalog, const std::string& dir) {
  std::vector<std::string> loaded;
  if (!fs::is_directory(dir)) return loaded;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && source_kind(entry.path().string())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string id = path.stem().string();
    catalog.add(load_log_file(path.string(), id));
    loaded.push_back(id);
  }
  std::sort(loaded.begin(), loaded.end());
  return loaded;
}

std::string describe_schema(const store::Schema& schema) {
  std::size_t width = 0;
  for (auto level : {store::Level::Case, store::Level::Event}) {
    for (const auto& a : schema.attributes(level)) width = std::max(width, a.name.size());
  }
  std::string out;
  for (auto level : {store::Level::Case, store::Level::Event}) {
    out += fmt::format("{} attributes:\n", store::level_name(level));
    for (const auto& a : schema.attributes(level)) {
      out += fmt::format("  {:<{}}  {}\n", a.name, width, type_name(a.type));
    }
  }
  return out;
}

std::string describe_logs(const store::Catalog& catalog) {
  auto logs = catalog.list();
  if (logs.empty()) return "(no logs)\n";
  std::string out;
  for (const auto& log : logs) {
    out += fmt::format("{}  cases={} events={}\n", log->log_id(), log->case_count(), log->event_count());
  }
  return out;
}

bool execute_statement(Session& session, std::string_view statement, std::ostream& out, std::ostream& err,
                       bool* quit) {
  std::string_view body = skip_comments(statement);
  if (body.empty()) return true;
  if (body.front() == '\\') return run_meta(session, body, out, err, quit);
  try {
    ResultTable table = session.engine->query(statement, session.current_log);
    out << render(table, session.format);
    return true;
  } catch (const Error& e) {
    print_error(err, Diagnostic::from(e), statement);
  } catch (const std::exception& e) {
    print_error(err, {ErrorCode::Internal, e.what(), {}}, statement);
  }
  return false;
}

std::optional<std::size_t> last_statement_end(std::string_view text) {
  std::optional<std::size_t> end;
  char quote = 0;
  bool comment = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (comment) {
      if (c == '\n') comment = false;
    } else if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      comment = true;
    } else if (c == ';') {
      end = i + 1;
    }
  }
  return end;
}

int repl_loop(Session& session, std::istream& in, std::ostream& out, std::ostream& err, bool interactive) {
  std::string buffer;
  auto prompt = [&] {
    if (interactive) out << (is_blank(buffer) ? "signal> " : "   ...> ") << std::flush;
  };
  bool quit = false;
  prompt();
  for (std::string line; !quit && std::getline(in, line);) {
    if (is_blank(buffer) && !trim(line).empty() && trim(line).front() == '\\') {
      buffer.clear();
      execute_statement(session, line, out, err, &quit);
      prompt();
      continue;
    }
    buffer += line;
    buffer += '\n';
    if (auto end = last_statement_end(buffer)) {
      for (const auto& stmt : parser::split_statements(std::string_view(buffer).substr(0, *end))) {
        execute_statement(session, stmt, out, err, &quit);
        if (quit) break;
      }
      buffer.erase(0, *end);
      if (is_blank(buffer)) buffer.clear();
    }
    prompt();
  }
  if (!quit && !is_blank(buffer)) execute_statement(session, buffer, out, err, &quit);
  return 0;
}

int run_batch(Session& session, std::string_view script, std::ostream& out, std::ostream& err) {
  bool first = true;
  bool quit = false;
  for (const auto& stmt : parser::split_statements(script)) {
    if (skip_comments(stmt).empty()) continue;
    if (!first && session.format != OutputFormat::Json) out << '\n';
    first = false;
    if (!execute_statement(session, stmt, out, err, &quit)) return 1;
    if (quit) break;
  }
  return 0;
}

}  // namespace signaldb::api
