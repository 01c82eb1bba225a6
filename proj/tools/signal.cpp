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

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "signaldb/api.hpp"
#include "signaldb/http.hpp"

namespace {

using signaldb::Diagnostic;
using signaldb::Error;
using signaldb::ErrorCode;
namespace api = signaldb::api;
namespace fs = std::filesystem;

std::string default_data_dir() {
  const char* env = std::getenv("SIGNAL_DATA_DIR");
  return env ? env : "";
}

int fail(const Diagnostic& diag) {
  std::cerr << signaldb::render_diagnostic(diag, "") << '\n';
  return 1;
}

// Loads the data directory, then resolves `log` either as a loaded id or as
// a file path registered under its stem.
void prepare(api::Session& session, const std::string& data_dir, const std::string& log) {
  if (!data_dir.empty()) api::load_data_dir(session.engine->catalog(), data_dir);
  if (log.empty()) return;
  if (session.engine->catalog().find(log)) {
    session.current_log = log;
  } else if (api::source_kind(log) && fs::exists(log)) {
    std::string id = fs::path(log).stem().string();
    session.engine->catalog().add(api::load_log_file(log, id));
    session.current_log = id;
  } else {
    throw Error(ErrorCode::UnknownLog, "unknown log '" + log + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signal: process-mining query engine"};
  app.require_subcommand(1);

  std::string log;
  std::string data_dir = default_data_dir();
  std::string file;
  std::string format = "table";
  std::string config;
  std::string host = "127.0.0.1";
  int port = 8080;

  auto* repl = app.add_subcommand("repl", "Interactive query shell");
  repl->add_option("--log", log, "Log id or CSV/TSV/XES file bound to THIS_PROCESS");
  repl->add_option("--data", data_dir, "Data directory (default: $SIGNAL_DATA_DIR)");
  repl->add_option("--format", format, "table, csv or json");

  auto* run = app.add_subcommand("run", "Run a file of ';'-terminated queries");
  run->add_option("file", file, "Query file")->required();
  run->add_option("--log", log, "Log id or CSV/TSV/XES file bound to THIS_PROCESS");
  run->add_option("--data", data_dir, "Data directory (default: $SIGNAL_DATA_DIR)");
  run->add_option("--format", format, "table, csv or json");

  auto* ingest = app.add_subcommand("ingest", "Validate a log file and store it in the data directory");
  ingest->add_option("file", file, "CSV, TSV or XES file")->required();
  ingest->add_option("--config", config, "JSON ingest config file");
  ingest->add_option("--log", log, "Log id")->required();
  ingest->add_option("--data", data_dir, "Data directory (default: $SIGNAL_DATA_DIR)");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--port", port, "Port");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--data", data_dir, "Data directory (default: $SIGNAL_DATA_DIR)");

  CLI11_PARSE(app, argc, argv);

  try {
    api::Session session;
    auto fmt = api::parse_format(format);
    if (!fmt) return fail({ErrorCode::InvalidRequest, "format must be table, csv or json", {}});
    session.format = *fmt;

    if (*repl) {
      prepare(session, data_dir, log);
      return api::repl_loop(session, std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
    }
    if (*run) {
      prepare(session, data_dir, log);
      std::ifstream in(file, std::ios::binary);
      if (!in) return fail({ErrorCode::IoError, "cannot read '" + file + "'", {}});
      std::ostringstream script;
      script << in.rdbuf();
      return api::run_batch(session, script.str(), std::cout, std::cerr);
    }
    if (*ingest) {
      if (!api::is_valid_log_id(log)) return fail({ErrorCode::InvalidRequest, "invalid log id '" + log + "'", {}});
      auto kind = api::source_kind(file);
      if (!kind) return fail({ErrorCode::IoError, "'" + file + "' is not a .csv, .tsv or .xes file", {}});
      std::optional<nlohmann::json> cfg;
      if (!config.empty()) {
        std::ifstream cin(config);
        if (!cin) return fail({ErrorCode::IoError, "cannot read '" + config + "'", {}});
        cfg = nlohmann::json::parse(cin, nullptr, false);
        if (cfg->is_discarded()) return fail({ErrorCode::InvalidConfig, "config is not valid JSON", {}});
      }
      auto loaded = api::load_log_file(file, log, cfg);
      if (!data_dir.empty()) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream content;
        content << in.rdbuf();
        api::persist_log(data_dir, log, *kind, content.str(), cfg ? *cfg : api::side_config(file));
      }
      std::cout << log << ": " << loaded->case_count() << " cases, " << loaded->event_count() << " events\n";
      return 0;
    }
    if (*serve) {
      auto engine = session.engine;
      if (!data_dir.empty()) api::load_data_dir(engine->catalog(), data_dir);
      api::ServiceConfig sc;
      if (!data_dir.empty()) sc.data_dir = data_dir;
      api::Service service(engine, sc);
      std::cerr << "listening on " << host << ":" << port << '\n';
      if (!api::http_serve(service, host, port)) {
        return fail({ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port), {}});
      }
      return 0;
    }
  } catch (const Error& e) {
    return fail(Diagnostic::from(e));
  } catch (const std::exception& e) {
    return fail({ErrorCode::Internal, e.what(), {}});
  }
  return 0;
}
