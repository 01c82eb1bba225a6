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

#include "signaldb/bound_expr.hpp"

#include <fmt/format.h>

namespace signaldb::analyzer {

std::string_view agg_name(AggKind k) {
  switch (k) {
    case AggKind::Count: return "COUNT";
    case AggKind::CountStar: return "COUNT";
    case AggKind::Sum: return "SUM";
    case AggKind::Avg: return "AVG";
    case AggKind::Min: return "MIN";
    case AggKind::Max: return "MAX";
    case AggKind::First: return "FIRST";
    case AggKind::Last: return "LAST";
  }
  return "?";
}

std::string_view func_name(FuncKind k) {
  switch (k) {
    case FuncKind::Abs: return "ABS";
    case FuncKind::Millis: return "MILLIS";
    case FuncKind::ToDuration: return "DURATION";
    case FuncKind::ToTimestamp: return "TIMESTAMP";
    case FuncKind::Lower: return "LOWER";
    case FuncKind::Upper: return "UPPER";
  }
  return "?";
}

std::string_view op_text(BoundOp op) {
  switch (op) {
    case BoundOp::Add: return "+";
    case BoundOp::Sub: return "-";
    case BoundOp::Mul: return "*";
    case BoundOp::Div: return "/";
    case BoundOp::Eq: return "=";
    case BoundOp::Ne: return "<>";
    case BoundOp::Lt: return "<";
    case BoundOp::Le: return "<=";
    case BoundOp::Gt: return ">";
    case BoundOp::Ge: return ">=";
    case BoundOp::And: return "AND";
    case BoundOp::Or: return "OR";
    case BoundOp::Not: return "NOT";
    case BoundOp::Neg: return "-";
    case BoundOp::EqIgnoreCase: return "=~";
  }
  return "?";
}

bool same(const BoundExpr& a, const BoundExpr& b) {
  if (a.kind != b.kind || a.type != b.type || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case BoundExpr::Kind::Literal:
      if (!(a.literal == b.literal)) return false;
      break;
    case BoundExpr::Kind::Column:
      if (a.column != b.column) return false;
      break;
    case BoundExpr::Kind::Slot:
    case BoundExpr::Kind::AggRef:
    case BoundExpr::Kind::Aggregate:
      if (a.slot != b.slot) return false;
      break;
    case BoundExpr::Kind::Unary:
    case BoundExpr::Kind::Binary:
      if (a.op != b.op) return false;
      break;
    case BoundExpr::Kind::InList:
    case BoundExpr::Kind::IsNull:
      if (a.negated != b.negated) return false;
      break;
    case BoundExpr::Kind::Function:
      if (a.func != b.func) return false;
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool same(const AggCall& a, const AggCall& b) {
  if (a.kind != b.kind || a.distinct != b.distinct || a.arg.has_value() != b.arg.has_value()) return false;
  return !a.arg || same(*a.arg, *b.arg);
}

namespace {

std::string literal_text(const Value& v) {
  if (v.is_null()) return "NULL";
  switch (v.type()) {
    case ScalarType::String: return fmt::format("'{}'", v.as_string());
    case ScalarType::Timestamp: return fmt::format("TIMESTAMP({})", v.as_int());
    case ScalarType::Duration: return fmt::format("DURATION({})", v.as_int());
    default: return v.to_string();
  }
}

}  // namespace

std::string describe(const BoundExpr& e, const store::Schema& schema) {
  auto arg = [&](std::size_t i) { return describe(e.args[i], schema); };
  switch (e.kind) {
    case BoundExpr::Kind::Literal: return literal_text(e.literal);
    case BoundExpr::Kind::Column: {
      const auto& attrs = schema.attributes(e.column.level);
      std::string name = e.column.index < attrs.size() ? attrs[e.column.index].name : "?";
      return fmt::format("{}.{}", e.column.level == store::Level::Case ? "case" : "event", name);
    }
    case BoundExpr::Kind::Slot: return fmt::format("#{}", e.slot);
    case BoundExpr::Kind::AggRef: return fmt::format("agg#{}", e.slot);
    case BoundExpr::Kind::Aggregate: return fmt::format("aggcall#{}", e.slot);
    case BoundExpr::Kind::Unary:
      return e.op == BoundOp::Not ? fmt::format("(NOT {})", arg(0)) : fmt::format("(-{})", arg(0));
    case BoundExpr::Kind::Binary: return fmt::format("({} {} {})", arg(0), op_text(e.op), arg(1));
    case BoundExpr::Kind::InList: {
      std::string out = fmt::format("({} {}IN (", arg(0), e.negated ? "NOT " : "");
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) out += ", ";
        out += arg(i);
      }
      return out + "))";
    }
    case BoundExpr::Kind::IsNull: return fmt::format("({} IS {}NULL)", arg(0), e.negated ? "NOT " : "");
    case BoundExpr::Kind::Function: {
      std::string out = fmt::format("{}(", func_name(e.func));
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += arg(i);
      }
      return out + ")";
    }
  }
  return "?";
}

std::string describe(const AggCall& a, const store::Schema& schema) {
  if (a.kind == AggKind::CountStar) return "COUNT(*)";
  std::string inner = a.arg ? describe(*a.arg, schema) : "";
  std::string out = fmt::format("{}({}{})", agg_name(a.kind), a.distinct ? "DISTINCT " : "", inner);
  if (a.positional) out += "@boundary";
  return out;
}

}  // namespace signaldb::analyzer
