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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "signaldb/ast.hpp"
#include "signaldb/bound_expr.hpp"
#include "signaldb/pattern.hpp"
#include "signaldb/store.hpp"

namespace signaldb::analyzer {

struct TypedExpr {
  BoundExpr expr;
  ScalarType type = ScalarType::Boolean;
  Level level = Level::Case;
};

/// Types a standalone expression. `context` is the row level the expression
/// is evaluated at: Case for the nested case view, Event for the rows of an
/// event subquery.
TypedExpr type_of(const parser::Expr& expr, const store::Schema& schema, Level context = Level::Case);

// One per-case aggregation over the case's events, written to a frame slot.
struct EventSubquery {
  std::vector<AggCall> aggs;        // referenced from `result` as AggRef(i)
  std::optional<BoundExpr> filter;  // event-level predicate
  BoundExpr result;
  std::size_t slot = 0;
};

struct PatternSpec {
  std::vector<pattern::Behaviour> behaviours;
  parser::Pattern pattern;  // literal atoms already replaced by behaviours
  std::shared_ptr<const pattern::CompiledPattern> compiled;
  // Unset: drop non-matching cases. Set: keep all cases and write the
  // match result into this slot.
  std::optional<std::size_t> mark_slot;
};

struct ScanOp {
  std::string log_id;
  std::optional<std::vector<store::ColumnId>> columns;  // unset reads every column
  std::optional<std::int64_t> limit;                     // first k cases in storage order
};
struct FlattenOp {};
struct EventSubqueryOp {
  std::vector<EventSubquery> subqueries;
};
struct PatternFilterOp {
  PatternSpec spec;
};
struct FilterOp {
  BoundExpr predicate;
};
struct AggregateOp {
  std::vector<BoundExpr> keys;
  std::vector<AggCall> aggs;  // output slots are keys then aggs
};
struct SortKey {
  BoundExpr expr;
  bool descending = false;
};
struct SortOp {
  std::vector<SortKey> keys;
};
struct LimitOp {
  std::int64_t count = 0;
};
struct ProjectOp {
  std::vector<BoundExpr> exprs;
  std::vector<std::string> names;
};

using PlanOp =
    std::variant<ScanOp, FlattenOp, EventSubqueryOp, PatternFilterOp, FilterOp, AggregateOp, SortOp, LimitOp, ProjectOp>;

struct OutputColumn {
  std::string name;
  ScalarType type = ScalarType::String;
};

// Operators are listed bottom-up: ops.front() is the Scan and every later
// operator consumes the rows produced by the one before it.
struct LogicalPlan {
  std::vector<PlanOp> ops;
  std::vector<OutputColumn> output;
  std::size_t frame_slots = 0;  // derived slots available before any Aggregate
  bool flattened = false;
  store::Schema schema;

  std::string describe() const;
};

std::string_view op_name(const PlanOp& op);

/// The log a query reads from, or nullopt for THIS_PROCESS.
std::optional<std::string> source_log(const parser::QueryAst& ast);

LogicalPlan analyze(const parser::QueryAst& ast, const store::Schema& schema, const std::string& log_id = {});

}  // namespace signaldb::analyzer
