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
#include <optional>
#include <string>
#include <vector>

#include "signaldb/error.hpp"
#include "signaldb/store.hpp"
#include "signaldb/value.hpp"

namespace signaldb::analyzer {

using store::Level;

enum class AggKind { Count, CountStar, Sum, Avg, Min, Max, First, Last };
enum class FuncKind { Abs, Millis, ToDuration, ToTimestamp, Lower, Upper };
enum class BoundOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Not, Neg, EqIgnoreCase };

std::string_view agg_name(AggKind k);
std::string_view func_name(FuncKind k);
std::string_view op_text(BoundOp op);

/// A resolved, typed expression.
///
/// `level` is the expression's scope: Event when it yields one value per
/// event, Case when it yields one value per frame row. On a flattened source
/// every row is a single value, so every expression there is Case-level
/// even when it reads an event column.
struct BoundExpr {
  enum class Kind {
    Literal,
    Column,     // column: storage column in the snapshot
    Slot,       // slot: a derived column of the current frame
    AggRef,     // slot: result of an aggregate call local to an event subquery
    Unary,      // op in {Not, Neg}
    Binary,
    InList,     // args[0] IN args[1..]; negated for NOT IN
    IsNull,     // negated for IS NOT NULL
    Function,   // func
    Aggregate,  // placeholder for aggregate call #slot during binding
  };

  Kind kind = Kind::Literal;
  ScalarType type = ScalarType::Boolean;
  Level level = Level::Case;
  Span span;
  Value literal;
  store::ColumnId column;
  std::size_t slot = 0;
  BoundOp op = BoundOp::Eq;
  FuncKind func = FuncKind::Abs;
  bool negated = false;
  std::vector<BoundExpr> args;

  static BoundExpr make_literal(Value v, Span span = {}) {
    BoundExpr e;
    e.kind = Kind::Literal;
    e.type = v.type();
    e.literal = std::move(v);
    e.span = span;
    return e;
  }
  static BoundExpr make_slot(std::size_t slot, ScalarType type, Span span = {}) {
    BoundExpr e;
    e.kind = Kind::Slot;
    e.slot = slot;
    e.type = type;
    e.span = span;
    return e;
  }
  static BoundExpr make_column(store::ColumnId id, ScalarType type, Level level, Span span = {}) {
    BoundExpr e;
    e.kind = Kind::Column;
    e.column = id;
    e.type = type;
    e.level = level;
    e.span = span;
    return e;
  }
};

/// An aggregate function application.
struct AggCall {
  AggKind kind = AggKind::CountStar;
  bool distinct = false;
  std::optional<BoundExpr> arg;  // absent for COUNT(*)
  ScalarType type = ScalarType::Number;
  // FIRST/LAST only: read the value at the case-range boundary instead of
  // scanning the case for its earliest/latest event.
  bool positional = false;
};

/// Structural equality ignoring spans.
bool same(const BoundExpr& a, const BoundExpr& b);
bool same(const AggCall& a, const AggCall& b);

/// Compact rendering for plan dumps, e.g. `(LAST(end_time) - FIRST(end_time))`.
std::string describe(const BoundExpr& e, const store::Schema& schema);
std::string describe(const AggCall& a, const store::Schema& schema);

/// Visits `e` and its descendants in pre-order.
template <typename F>
void visit(const BoundExpr& e, F&& f) {
  f(e);
  for (const auto& a : e.args) visit(a, f);
}

}  // namespace signaldb::analyzer
