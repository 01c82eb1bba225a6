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

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "signaldb/executor.hpp"
#include "signaldb/timestamp.hpp"

namespace signaldb::exec {

using analyzer::BoundExpr;
using analyzer::BoundOp;
using analyzer::FuncKind;

namespace {

struct Input {
  const store::Snapshot& snapshot;
  std::size_t rows;
  std::span<const std::uint32_t> case_idx;
  std::span<const std::uint32_t> event_idx;
  const std::vector<Vec>* slots;
  const std::vector<Vec>* agg_refs;
};

Vec eval(const BoundExpr& e, const Input& in);

bool is_comparison(BoundOp op) {
  switch (op) {
    case BoundOp::Eq:
    case BoundOp::Ne:
    case BoundOp::Lt:
    case BoundOp::Le:
    case BoundOp::Gt:
    case BoundOp::Ge:
    case BoundOp::EqIgnoreCase: return true;
    default: return false;
  }
}

std::span<const std::uint32_t> positions(const BoundExpr& column, const Input& in) {
  if (column.column.level == store::Level::Case) return in.case_idx;
  if (in.event_idx.empty() && in.rows > 0) {
    throw Error(ErrorCode::Internal, "event column evaluated without event rows", column.span);
  }
  return in.event_idx;
}

// String column compared with a string literal: decide once per dictionary
// entry, then map codes to results.
std::optional<Vec> dictionary_compare(const BoundExpr& e, const Input& in) {
  if (e.op != BoundOp::Eq && e.op != BoundOp::Ne && e.op != BoundOp::EqIgnoreCase) return std::nullopt;
  const BoundExpr* col = &e.args[0];
  const BoundExpr* lit = &e.args[1];
  if (col->kind != BoundExpr::Kind::Column) std::swap(col, lit);
  if (col->kind != BoundExpr::Kind::Column || lit->kind != BoundExpr::Kind::Literal) return std::nullopt;
  if (col->type != ScalarType::String || lit->literal.is_null()) return std::nullopt;

  const store::Column& column = in.snapshot.column(col->column);
  const auto& dict = column.dictionary();
  const std::string& needle = lit->literal.as_string();
  std::vector<std::uint8_t> hit(dict.size());
  for (std::size_t code = 0; code < dict.size(); ++code) {
    const std::string& s = dict.at(static_cast<std::int64_t>(code));
    bool eq = e.op == BoundOp::EqIgnoreCase ? store::iequals(s, needle) : s == needle;
    hit[code] = (e.op == BoundOp::Ne) ? !eq : eq;
  }
  auto index = positions(*col, in);
  auto codes = column.ints();
  auto validity = column.validity();
  Vec out(ScalarType::Boolean, in.rows);
  for (std::size_t i = 0; i < in.rows; ++i) {
    const auto p = index[i];
    out.valid[i] = validity[p];
    out.ints[i] = validity[p] ? hit[static_cast<std::size_t>(codes[p])] : 0;
  }
  return out;
}

std::int64_t to_millis(double v, std::string_view fn) {
  if (!std::isfinite(v) || std::fabs(v) > 9.2e18) {
    throw Error(ErrorCode::EvaluationError, fmt::format("{}: value {} is out of range", fn, v));
  }
  return std::llround(v);
}

Vec function(const BoundExpr& e, const Input& in) {
  Vec arg = eval(e.args[0], in);
  Vec out(e.type, arg.size());
  out.valid = arg.valid;
  const auto name = analyzer::func_name(e.func);
  for (std::size_t i = 0; i < arg.size(); ++i) {
    if (arg.is_null(i)) continue;
    switch (e.func) {
      case FuncKind::Abs:
        if (arg.type == ScalarType::Number) {
          out.nums[i] = std::fabs(arg.nums[i]);
        } else {
          if (arg.ints[i] == INT64_MIN) throw Error(ErrorCode::EvaluationError, "arithmetic overflow in ABS");
          out.ints[i] = arg.ints[i] < 0 ? -arg.ints[i] : arg.ints[i];
        }
        break;
      case FuncKind::Millis: out.nums[i] = static_cast<double>(arg.ints[i]); break;
      case FuncKind::ToDuration: out.ints[i] = to_millis(arg.nums[i], name); break;
      case FuncKind::ToTimestamp:
        if (arg.type == ScalarType::Number) {
          out.ints[i] = to_millis(arg.nums[i], name);
        } else if (auto ms = ts::parse_iso8601(arg.strs[i])) {
          out.ints[i] = *ms;
        } else if (auto ms2 = ts::parse_epoch_millis(arg.strs[i])) {
          out.ints[i] = *ms2;
        } else {
          out.valid[i] = 0;
        }
        break;
      case FuncKind::Lower:
      case FuncKind::Upper: {
        std::string s = arg.strs[i];
        for (auto& c : s) {
          auto u = static_cast<unsigned char>(c);
          c = static_cast<char>(e.func == FuncKind::Lower ? std::tolower(u) : std::toupper(u));
        }
        out.strs[i] = std::move(s);
        break;
      }
    }
  }
  return out;
}

Vec eval(const BoundExpr& e, const Input& in) {
  switch (e.kind) {
    case BoundExpr::Kind::Literal: return Vec::constant(e.literal);
    case BoundExpr::Kind::Column: return Vec::gather(in.snapshot.column(e.column), positions(e, in));
    case BoundExpr::Kind::Slot:
      if (!in.slots || e.slot >= in.slots->size()) throw Error(ErrorCode::Internal, "slot out of range", e.span);
      return (*in.slots)[e.slot];
    case BoundExpr::Kind::AggRef:
      if (!in.agg_refs || e.slot >= in.agg_refs->size()) {
        throw Error(ErrorCode::Internal, "aggregate reference out of range", e.span);
      }
      return (*in.agg_refs)[e.slot];
    case BoundExpr::Kind::Aggregate:
      throw Error(ErrorCode::Internal, "unbound aggregate call", e.span);
    case BoundExpr::Kind::Unary: {
      Vec a = eval(e.args[0], in);
      if (e.op == BoundOp::Not) return vector_not(a);
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.is_null(i)) continue;
        if (a.type == ScalarType::Number) {
          a.nums[i] = -a.nums[i];
        } else {
          if (a.ints[i] == INT64_MIN) throw Error(ErrorCode::EvaluationError, "arithmetic overflow in unary '-'");
          a.ints[i] = -a.ints[i];
        }
      }
      return a;
    }
    case BoundExpr::Kind::Binary: {
      if (is_comparison(e.op)) {
        if (auto fast = dictionary_compare(e, in)) return std::move(*fast);
      }
      Vec a = eval(e.args[0], in);
      Vec b = eval(e.args[1], in);
      if (e.op == BoundOp::And || e.op == BoundOp::Or) return vector_logic(a, e.op, b);
      if (is_comparison(e.op)) return vector_compare(a, e.op, b);
      return vector_arith(a, e.op, b, e.type);
    }
    case BoundExpr::Kind::InList: {
      Vec lhs = eval(e.args[0], in);
      Vec acc = Vec::constant(Value::boolean(false));
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        acc = vector_logic(acc, BoundOp::Or, vector_compare(lhs, BoundOp::Eq, eval(e.args[i], in)));
      }
      return e.negated ? vector_not(acc) : acc;
    }
    case BoundExpr::Kind::IsNull: {
      Vec a = eval(e.args[0], in);
      Vec out(ScalarType::Boolean, a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out.ints[i] = (a.is_null(i) != e.negated) ? 1 : 0;
      return out;
    }
    case BoundExpr::Kind::Function: return function(e, in);
  }
  throw Error(ErrorCode::Internal, "unhandled expression", e.span);
}

}  // namespace

Vec evaluate(const BoundExpr& expr, const store::Snapshot& snapshot, std::size_t rows,
             std::span<const std::uint32_t> case_idx, std::span<const std::uint32_t> event_idx,
             const std::vector<Vec>* slots, const std::vector<Vec>* agg_refs) {
  Input in{snapshot, rows, case_idx, event_idx, slots, agg_refs};
  Vec v = eval(expr, in);
  if (v.size() == rows) return v;
  if (v.size() != 1) throw Error(ErrorCode::Internal, "expression produced the wrong number of rows", expr.span);
  std::vector<std::uint32_t> zeros(rows, 0);
  return v.take(zeros);
}

}  // namespace signaldb::exec
