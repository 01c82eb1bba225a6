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

#include "signaldb/engine.hpp"

#include <fmt/format.h>

#include "signaldb/parser.hpp"

namespace signaldb {

Engine::Engine(std::shared_ptr<store::Catalog> catalog, exec::ExecOptions options)
    : catalog_(std::move(catalog)), options_(options) {}

std::pair<analyzer::LogicalPlan, store::EventLogPtr> Engine::prepare(std::string_view query,
                                                                     const std::optional<std::string>& current_log,
                                                                     bool optimize) const {
  parser::QueryAst ast = parser::parse_query(query);
  const Span from_span = ast.from ? ast.from->span : ast.span;
  std::string log_id;
  if (auto named = analyzer::source_log(ast)) {
    log_id = *named;
  } else if (current_log) {
    log_id = *current_log;
  } else {
    throw Error(ErrorCode::NoCurrentProcess, "THIS_PROCESS is not bound to a log; open one first", from_span);
  }
  store::EventLogPtr log = catalog_->find(log_id);
  if (!log) throw Error(ErrorCode::UnknownLog, fmt::format("unknown log '{}'", log_id), from_span);
  analyzer::LogicalPlan plan = analyzer::analyze(ast, log->schema(), log_id);
  if (optimize) plan = exec::optimize(std::move(plan));
  return {std::move(plan), std::move(log)};
}

analyzer::LogicalPlan Engine::plan(std::string_view query, const std::optional<std::string>& current_log,
                                   bool optimize) const {
  return prepare(query, current_log, optimize).first;
}

std::shared_ptr<exec::PhysicalPlan> Engine::physical_plan(std::string_view query,
                                                          const std::optional<std::string>& current_log,
                                                          bool optimize) const {
  auto [plan, log] = prepare(query, current_log, optimize);
  // The snapshot is taken here; appends to the log after this point are
  // invisible to the query.
  auto snapshot = log->snapshot(exec::required_columns(plan));
  return exec::build_physical(plan, std::move(snapshot), options_);
}

ResultTable Engine::query(std::string_view query, const std::optional<std::string>& current_log,
                          bool optimize) const {
  return exec::execute(physical_plan(query, current_log, optimize));
}

}  // namespace signaldb
