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

#include "signaldb/analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "signaldb/timestamp.hpp"

namespace signaldb::analyzer {

using parser::Expr;
using parser::Pattern;
using parser::QueryAst;
using store::iequals;

namespace {

enum class Scope {
  Case,    // one row per case; event columns are multi-valued
  Flat,    // one row per event with case attributes repeated
  Events,  // rows of one case's nested events table
};

struct Ctx {
  Scope scope = Scope::Case;
  std::vector<AggCall>* aggs = nullptr;  // set where aggregate calls may appear
  bool in_aggregate = false;
  bool allow_subquery = true;
  bool allow_matches = true;
};

Level combine(Level a, Level b) { return a == Level::Event || b == Level::Event ? Level::Event : Level::Case; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void type_error(Span span, std::string_view what, std::string_view expected, ScalarType found) {
  throw Error(ErrorCode::TypeError, fmt::format("{} expects {}, found {}", what, expected, type_name(found)), span);
}

void require_type(const BoundExpr& e, ScalarType t, std::string_view what) {
  if (e.type != t) type_error(e.span, what, type_name(t), e.type);
}

// Integral number literals adopt a temporal type, ISO-8601 string literals
// become timestamps, so `end_time > 1675200000000` type-checks. NULL
// literals take the other operand's type.
void coerce_literal(BoundExpr& lit, ScalarType target) {
  if (lit.kind != BoundExpr::Kind::Literal || lit.type == target) return;
  if (lit.literal.is_null()) {
    lit.literal = Value::null(target);
    lit.type = target;
    return;
  }
  if (lit.type == ScalarType::Number && is_temporal(target)) {
    double v = lit.literal.as_number();
    if (std::trunc(v) != v || std::fabs(v) > 9.0e15) return;
    auto ms = static_cast<std::int64_t>(v);
    lit.literal = target == ScalarType::Timestamp ? Value::timestamp(ms) : Value::duration(ms);
    lit.type = target;
  } else if (lit.type == ScalarType::String && target == ScalarType::Timestamp) {
    if (auto ms = ts::parse_iso8601(lit.literal.as_string())) {
      lit.literal = Value::timestamp(*ms);
      lit.type = target;
    }
  }
}

bool contains_kind(const BoundExpr& e, BoundExpr::Kind kind) {
  bool found = false;
  visit(e, [&](const BoundExpr& x) { found = found || x.kind == kind; });
  return found;
}

BoundExpr conjunction(std::vector<BoundExpr> parts) {
  BoundExpr acc = std::move(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) {
    BoundExpr b;
    b.kind = BoundExpr::Kind::Binary;
    b.op = BoundOp::And;
    b.type = ScalarType::Boolean;
    b.level = combine(acc.level, parts[i].level);
    b.span = {acc.span.begin, parts[i].span.end};
    b.args.push_back(std::move(acc));
    b.args.push_back(std::move(parts[i]));
    acc = std::move(b);
  }
  return acc;
}

void split_conjuncts(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::Binary && e.bop == parser::BinaryOp::And) {
    split_conjuncts(e.args[0], out);
    split_conjuncts(e.args[1], out);
  } else {
    out.push_back(&e);
  }
}

const parser::Source* innermost(const parser::Source& s) {
  const parser::Source* cur = &s;
  while (cur->kind == parser::Source::Kind::Flatten && cur->inner) cur = &*cur->inner;
  return cur;
}

class Binder {
 public:
  Binder(const store::Schema& schema, bool flattened) : schema_(schema), flattened_(flattened) {}

  BoundExpr bind(const Expr& e, const Ctx& ctx) {
    switch (e.kind) {
      case Expr::Kind::Column: return column(e.name, e.span, ctx.scope);
      case Expr::Kind::Literal: return BoundExpr::make_literal(e.literal, e.span);
      case Expr::Kind::Star:
        throw Error(ErrorCode::SyntaxError, "'*' is only allowed as SELECT * or COUNT(*)", e.span);
      case Expr::Kind::Unary: return unary(e, ctx);
      case Expr::Kind::Binary: return binary(e, ctx);
      case Expr::Kind::InList: return in_list(e, ctx);
      case Expr::Kind::IsNull: {
        BoundExpr arg = bind(e.args[0], ctx);
        BoundExpr out;
        out.kind = BoundExpr::Kind::IsNull;
        out.type = ScalarType::Boolean;
        out.level = arg.level;
        out.negated = e.negated;
        out.span = e.span;
        out.args.push_back(std::move(arg));
        return out;
      }
      case Expr::Kind::Call: return call(e, ctx);
      case Expr::Kind::Subquery: return subquery(e, ctx);
      case Expr::Kind::Matches: {
        if (ctx.scope == Scope::Flat) matches_on_flattened(e.span);
        if (ctx.scope == Scope::Events || !ctx.allow_matches) {
          throw Error(ErrorCode::LevelError, "MATCHES is a case-level predicate and cannot be used here", e.span);
        }
        PatternSpec spec = pattern_spec(e);
        std::size_t slot = next_slot_++;
        spec.mark_slot = slot;
        marks_.push_back(std::move(spec));
        return BoundExpr::make_slot(slot, ScalarType::Boolean, e.span);
      }
    }
    throw Error(ErrorCode::Internal, "unhandled expression", e.span);
  }

  [[noreturn]] static void matches_on_flattened(Span span) {
    throw Error(ErrorCode::MatchesOnFlattened,
                "row pattern matching needs the nested case view; it is not available on FLATTEN", span);
  }

  void declare_behaviour(const parser::BehaviourDef& def) {
    for (const auto& b : declared_) {
      if (iequals(b.name, def.name)) {
        throw Error(ErrorCode::DuplicateBehaviour, fmt::format("behaviour '{}' is defined twice", def.name),
                    def.span);
      }
    }
    if (schema_.find(Level::Case, def.name) || schema_.find(Level::Event, def.name)) {
      throw Error(ErrorCode::DuplicateBehaviour,
                  fmt::format("behaviour '{}' has the same name as a column", def.name), def.span);
    }
    Ctx ctx{Scope::Events, nullptr, false, false, false};
    BoundExpr pred = bind(def.expr, ctx);
    if (pred.type != ScalarType::Boolean) {
      throw Error(ErrorCode::NonBooleanBehaviour,
                  fmt::format("behaviour '{}' must be a Boolean expression, found {}", def.name,
                              type_name(pred.type)),
                  def.expr.span);
    }
    declared_.push_back({def.name, std::move(pred)});
  }

  PatternSpec pattern_spec(const Expr& e) {
    PatternSpec spec;
    const std::string subject_name = e.subject.value_or(std::string(store::Schema::kEventName));
    std::optional<BoundExpr> subject;
    spec.pattern = *e.pattern;
    resolve_atoms(spec.pattern, spec, subject_name, subject, e.span);
    spec.compiled = std::make_shared<pattern::CompiledPattern>(pattern::compile(spec.pattern, spec.behaviours));
    return spec;
  }

  static PatternSpec single_behaviour_spec(std::string name, BoundExpr predicate) {
    PatternSpec spec;
    spec.pattern = Pattern::behaviour(name);
    spec.behaviours.push_back({std::move(name), std::move(predicate)});
    spec.compiled = std::make_shared<pattern::CompiledPattern>(pattern::compile(spec.pattern, spec.behaviours));
    return spec;
  }

  std::vector<EventSubquery> subqueries_;
  std::vector<PatternSpec> marks_;
  std::size_t next_slot_ = 0;

 private:
  BoundExpr column(const std::string& name, Span span, Scope scope) {
    auto case_idx = schema_.find(Level::Case, name);
    auto event_idx = schema_.find(Level::Event, name);
    std::optional<store::ColumnId> id;
    if (scope == Scope::Events) {
      if (event_idx) id = store::ColumnId{Level::Event, *event_idx};
      else if (case_idx) id = store::ColumnId{Level::Case, *case_idx};
    } else {
      if (case_idx) id = store::ColumnId{Level::Case, *case_idx};
      else if (event_idx) id = store::ColumnId{Level::Event, *event_idx};
    }
    if (!id) throw Error(ErrorCode::UnknownColumn, fmt::format("unknown column '{}'", name), span);
    const auto& attr = schema_.attributes(id->level)[id->index];
    Level level = scope == Scope::Flat ? Level::Case : id->level;
    return BoundExpr::make_column(*id, attr.type, level, span);
  }

  BoundExpr unary(const Expr& e, const Ctx& ctx) {
    BoundExpr arg = bind(e.args[0], ctx);
    BoundExpr out;
    out.kind = BoundExpr::Kind::Unary;
    out.level = arg.level;
    out.span = e.span;
    if (e.uop == parser::UnaryOp::Not) {
      require_type(arg, ScalarType::Boolean, "NOT");
      out.op = BoundOp::Not;
      out.type = ScalarType::Boolean;
    } else {
      if (arg.type != ScalarType::Number && arg.type != ScalarType::Duration) {
        type_error(arg.span, "unary '-'", "Number or Duration", arg.type);
      }
      out.op = BoundOp::Neg;
      out.type = arg.type;
    }
    out.args.push_back(std::move(arg));
    return out;
  }

  static BoundOp to_bound(parser::BinaryOp op) {
    using parser::BinaryOp;
    switch (op) {
      case BinaryOp::Add: return BoundOp::Add;
      case BinaryOp::Sub: return BoundOp::Sub;
      case BinaryOp::Mul: return BoundOp::Mul;
      case BinaryOp::Div: return BoundOp::Div;
      case BinaryOp::Eq: return BoundOp::Eq;
      case BinaryOp::Ne: return BoundOp::Ne;
      case BinaryOp::Lt: return BoundOp::Lt;
      case BinaryOp::Le: return BoundOp::Le;
      case BinaryOp::Gt: return BoundOp::Gt;
      case BinaryOp::Ge: return BoundOp::Ge;
      case BinaryOp::And: return BoundOp::And;
      case BinaryOp::Or: return BoundOp::Or;
    }
    return BoundOp::Eq;
  }

  static std::optional<ScalarType> arithmetic_type(BoundOp op, ScalarType l, ScalarType r) {
    using T = ScalarType;
    if (l == T::Number && r == T::Number) return T::Number;
    if (op == BoundOp::Add) {
      if (l == T::Timestamp && r == T::Duration) return T::Timestamp;
      if (l == T::Duration && r == T::Timestamp) return T::Timestamp;
      if (l == T::Duration && r == T::Duration) return T::Duration;
    } else if (op == BoundOp::Sub) {
      if (l == T::Timestamp && r == T::Timestamp) return T::Duration;
      if (l == T::Timestamp && r == T::Duration) return T::Timestamp;
      if (l == T::Duration && r == T::Duration) return T::Duration;
    }
    return std::nullopt;
  }

  BoundExpr binary(const Expr& e, const Ctx& ctx) {
    BoundExpr l = bind(e.args[0], ctx);
    BoundExpr r = bind(e.args[1], ctx);
    BoundExpr out;
    out.kind = BoundExpr::Kind::Binary;
    out.op = to_bound(e.bop);
    out.span = e.span;
    out.level = combine(l.level, r.level);
    const auto op_str = parser::binary_op_text(e.bop);
    switch (out.op) {
      case BoundOp::And:
      case BoundOp::Or:
        require_type(l, ScalarType::Boolean, op_str);
        require_type(r, ScalarType::Boolean, op_str);
        out.type = ScalarType::Boolean;
        break;
      case BoundOp::Add:
      case BoundOp::Sub:
      case BoundOp::Mul:
      case BoundOp::Div: {
        auto t = arithmetic_type(out.op, l.type, r.type);
        if (!t) {
          throw Error(ErrorCode::TypeError,
                      fmt::format("operator '{}' is not defined for {} and {}", op_str, type_name(l.type),
                                  type_name(r.type)),
                      e.span);
        }
        out.type = *t;
        break;
      }
      default:
        coerce_literal(l, r.type);
        coerce_literal(r, l.type);
        if (l.type != r.type) {
          throw Error(ErrorCode::TypeError,
                      fmt::format("cannot compare {} with {}", type_name(l.type), type_name(r.type)), e.span);
        }
        out.type = ScalarType::Boolean;
        break;
    }
    out.args.push_back(std::move(l));
    out.args.push_back(std::move(r));
    return out;
  }

  BoundExpr in_list(const Expr& e, const Ctx& ctx) {
    BoundExpr out;
    out.kind = BoundExpr::Kind::InList;
    out.type = ScalarType::Boolean;
    out.negated = e.negated;
    out.span = e.span;
    BoundExpr lhs = bind(e.args[0], ctx);
    out.level = lhs.level;
    out.args.push_back(std::move(lhs));
    for (std::size_t i = 1; i < e.args.size(); ++i) {
      BoundExpr item = bind(e.args[i], ctx);
      coerce_literal(item, out.args[0].type);
      coerce_literal(out.args[0], item.type);
      if (item.type != out.args[0].type) {
        throw Error(ErrorCode::TypeError,
                    fmt::format("IN list item of type {} does not match {}", type_name(item.type),
                                type_name(out.args[0].type)),
                    item.span);
      }
      out.level = combine(out.level, item.level);
      out.args.push_back(std::move(item));
    }
    return out;
  }

  BoundExpr call(const Expr& e, const Ctx& ctx) {
    const std::string name = upper(e.name);
    static const std::pair<std::string_view, AggKind> kAggs[] = {
        {"COUNT", AggKind::Count}, {"SUM", AggKind::Sum},     {"AVG", AggKind::Avg},  {"MIN", AggKind::Min},
        {"MAX", AggKind::Max},     {"FIRST", AggKind::First}, {"LAST", AggKind::Last},
    };
    for (auto [n, kind] : kAggs) {
      if (n == name) return aggregate(e, kind, ctx);
    }
    static const std::pair<std::string_view, FuncKind> kFuncs[] = {
        {"ABS", FuncKind::Abs},           {"MILLIS", FuncKind::Millis}, {"DURATION", FuncKind::ToDuration},
        {"TIMESTAMP", FuncKind::ToTimestamp}, {"LOWER", FuncKind::Lower}, {"UPPER", FuncKind::Upper},
    };
    for (auto [n, kind] : kFuncs) {
      if (n == name) return function(e, kind, ctx);
    }
    throw Error(ErrorCode::UnknownFunction, fmt::format("unknown function '{}'", e.name), e.span);
  }

  BoundExpr function(const Expr& e, FuncKind kind, const Ctx& ctx) {
    if (e.args.size() != 1 || e.distinct) {
      throw Error(ErrorCode::TypeError, fmt::format("{} takes exactly one argument", func_name(kind)), e.span);
    }
    BoundExpr arg = bind(e.args[0], ctx);
    using T = ScalarType;
    std::optional<T> result;
    switch (kind) {
      case FuncKind::Abs:
        if (arg.type == T::Number || arg.type == T::Duration) result = arg.type;
        break;
      case FuncKind::Millis:
        if (is_temporal(arg.type)) result = T::Number;
        break;
      case FuncKind::ToDuration:
        if (arg.type == T::Number) result = T::Duration;
        break;
      case FuncKind::ToTimestamp:
        if (arg.type == T::Number || arg.type == T::String) result = T::Timestamp;
        break;
      case FuncKind::Lower:
      case FuncKind::Upper:
        if (arg.type == T::String) result = T::String;
        break;
    }
    if (!result) {
      throw Error(ErrorCode::TypeError,
                  fmt::format("{} is not defined for {}", func_name(kind), type_name(arg.type)), arg.span);
    }
    BoundExpr out;
    out.kind = BoundExpr::Kind::Function;
    out.func = kind;
    out.type = *result;
    out.level = arg.level;
    out.span = e.span;
    out.args.push_back(std::move(arg));
    return out;
  }

  BoundExpr aggregate(const Expr& e, AggKind kind, const Ctx& ctx) {
    const auto name = agg_name(kind);
    if (!ctx.aggs) {
      throw Error(ErrorCode::InvalidAggregate, fmt::format("aggregate function {} is not allowed here", name),
                  e.span);
    }
    if (ctx.in_aggregate) {
      throw Error(ErrorCode::InvalidAggregate, "aggregate functions cannot be nested", e.span);
    }
    if ((kind == AggKind::First || kind == AggKind::Last) && ctx.scope != Scope::Events) {
      throw Error(ErrorCode::InvalidAggregate,
                  fmt::format("{} is only available inside an event subquery", name), e.span);
    }
    if (e.args.size() != 1) {
      throw Error(ErrorCode::InvalidAggregate, fmt::format("{} takes exactly one argument", name), e.span);
    }
    AggCall agg;
    agg.kind = kind;
    agg.distinct = e.distinct;
    if (e.args[0].kind == Expr::Kind::Star) {
      if (kind != AggKind::Count) {
        throw Error(ErrorCode::InvalidAggregate, fmt::format("{}(*) is not supported", name), e.span);
      }
      agg.kind = AggKind::CountStar;
      agg.type = ScalarType::Number;
    } else {
      Ctx inner = ctx;
      inner.in_aggregate = true;
      BoundExpr arg = bind(e.args[0], inner);
      if (ctx.scope == Scope::Case && arg.level == Level::Event) level_error(arg, e.span);
      using T = ScalarType;
      switch (kind) {
        case AggKind::Count: agg.type = T::Number; break;
        case AggKind::Sum:
        case AggKind::Avg:
          if (arg.type != T::Number && arg.type != T::Duration) {
            type_error(arg.span, name, "Number or Duration", arg.type);
          }
          agg.type = arg.type;
          break;
        default: agg.type = arg.type; break;
      }
      agg.arg = std::move(arg);
    }
    auto& aggs = *ctx.aggs;
    std::size_t index = aggs.size();
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      if (same(aggs[i], agg)) index = i;
    }
    if (index == aggs.size()) aggs.push_back(agg);
    BoundExpr out;
    out.kind = BoundExpr::Kind::Aggregate;
    out.slot = index;
    out.type = agg.type;
    out.level = Level::Case;
    out.span = e.span;
    return out;
  }

 public:
  [[noreturn]] void level_error(const BoundExpr& e, Span span) const {
    std::string column = "an event column";
    visit(e, [&](const BoundExpr& x) {
      if (x.kind == BoundExpr::Kind::Column && x.column.level == Level::Event) {
        column = schema_.attributes(Level::Event)[x.column.index].name;
      }
    });
    throw Error(ErrorCode::LevelError,
                fmt::format("an expression involving {} refers to multiple values per case; aggregate it in an "
                            "event subquery such as (SELECT LAST({}))",
                            column, column),
                span);
  }

 private:
  static BoundExpr to_agg_refs(const BoundExpr& e) {
    if (e.kind == BoundExpr::Kind::Aggregate) {
      BoundExpr r = e;
      r.kind = BoundExpr::Kind::AggRef;
      return r;
    }
    BoundExpr out = e;
    for (auto& a : out.args) a = to_agg_refs(a);
    return out;
  }

  BoundExpr subquery(const Expr& e, const Ctx& ctx) {
    if (ctx.scope == Scope::Flat) {
      throw Error(ErrorCode::LevelError, "event subqueries need the nested case view and are not available on FLATTEN",
                  e.span);
    }
    if (ctx.scope == Scope::Events || !ctx.allow_subquery) {
      throw Error(ErrorCode::LevelError, "event subqueries cannot be nested", e.span);
    }
    const QueryAst& q = *e.subquery;
    if (q.from && (q.from->kind != parser::Source::Kind::Named || !iequals(q.from->name, "events"))) {
      throw Error(ErrorCode::SyntaxError, "an event subquery reads FROM events", q.from->span);
    }
    if (!q.behaviours.empty() || !q.group_by.empty() || !q.order_by.empty() || q.limit) {
      throw Error(ErrorCode::SyntaxError, "event subqueries support only SELECT, FROM events and WHERE", e.span);
    }
    if (q.select.size() != 1 || q.select[0].expr.kind == Expr::Kind::Star) {
      throw Error(ErrorCode::NonAggregatedSubquery, "an event subquery must return a single value", e.span);
    }

    EventSubquery sq;
    Ctx inner{Scope::Events, &sq.aggs, false, false, false};
    BoundExpr result = bind(q.select[0].expr, inner);
    if (sq.aggs.empty()) {
      throw Error(ErrorCode::NonAggregatedSubquery,
                  "an event subquery must aggregate its events to a single value (use FIRST, LAST, MIN, MAX, "
                  "SUM, AVG or COUNT)",
                  e.span);
    }
    visit(result, [&](const BoundExpr& x) {
      if (x.kind == BoundExpr::Kind::Column && x.column.level == Level::Event) {
        throw Error(ErrorCode::NonAggregatedSubquery,
                    fmt::format("event column '{}' is used outside an aggregation",
                                schema_.attributes(Level::Event)[x.column.index].name),
                    x.span);
      }
    });
    sq.result = to_agg_refs(result);
    sq.result.level = Level::Case;
    if (q.where) {
      Ctx fctx{Scope::Events, nullptr, false, false, false};
      BoundExpr f = bind(*q.where, fctx);
      require_type(f, ScalarType::Boolean, "WHERE");
      sq.filter = std::move(f);
    }
    const ScalarType type = sq.result.type;
    for (const auto& existing : subqueries_) {
      bool same_filter = existing.filter.has_value() == sq.filter.has_value() &&
                         (!sq.filter || same(*existing.filter, *sq.filter));
      bool same_aggs = existing.aggs.size() == sq.aggs.size() &&
                       std::equal(sq.aggs.begin(), sq.aggs.end(), existing.aggs.begin(),
                                  [](const AggCall& a, const AggCall& b) { return same(a, b); });
      if (same_filter && same_aggs && same(existing.result, sq.result)) {
        return BoundExpr::make_slot(existing.slot, type, e.span);
      }
    }
    sq.slot = next_slot_++;
    subqueries_.push_back(std::move(sq));
    return BoundExpr::make_slot(subqueries_.back().slot, type, e.span);
  }

  void resolve_atoms(Pattern& p, PatternSpec& spec, const std::string& subject_name,
                     std::optional<BoundExpr>& subject, Span span) {
    if (p.kind == Pattern::Kind::Literal) {
      if (!subject) {
        subject = column(subject_name, span, Scope::Events);
        if (subject->type != ScalarType::String) {
          type_error(span, "a string pattern atom", fmt::format("a String subject, '{}' is", subject_name),
                     subject->type);
        }
      }
      std::string key = fmt::format("'{}'", p.name);
      bool known = std::any_of(spec.behaviours.begin(), spec.behaviours.end(),
                               [&](const pattern::Behaviour& b) { return iequals(b.name, key); });
      if (!known) {
        BoundExpr pred;
        pred.kind = BoundExpr::Kind::Binary;
        pred.op = BoundOp::EqIgnoreCase;
        pred.type = ScalarType::Boolean;
        pred.level = subject->level;
        pred.span = p.span;
        pred.args.push_back(*subject);
        pred.args.push_back(BoundExpr::make_literal(Value::string(p.name), p.span));
        spec.behaviours.push_back({key, std::move(pred)});
      }
      p.kind = Pattern::Kind::Behaviour;
      p.name = key;
      return;
    }
    if (p.kind == Pattern::Kind::Behaviour) {
      auto it = std::find_if(declared_.begin(), declared_.end(),
                             [&](const pattern::Behaviour& b) { return iequals(b.name, p.name); });
      if (it == declared_.end()) {
        throw Error(ErrorCode::UnknownBehaviour, fmt::format("unknown behaviour '{}'", p.name), p.span);
      }
      bool known = std::any_of(spec.behaviours.begin(), spec.behaviours.end(),
                               [&](const pattern::Behaviour& b) { return iequals(b.name, it->name); });
      if (!known) spec.behaviours.push_back(*it);
      p.name = it->name;
      return;
    }
    for (auto& c : p.children) resolve_atoms(c, spec, subject_name, subject, span);
  }

  const store::Schema& schema_;
  bool flattened_;
  std::vector<pattern::Behaviour> declared_;
};

// Rewrites an expression evaluated after grouping: group keys and aggregate
// calls become slots of the aggregated frame.
BoundExpr post_aggregate(const BoundExpr& e, const std::vector<BoundExpr>& keys, const store::Schema& schema) {
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (same(e, keys[k])) return BoundExpr::make_slot(k, e.type, e.span);
  }
  if (e.kind == BoundExpr::Kind::Aggregate) return BoundExpr::make_slot(keys.size() + e.slot, e.type, e.span);
  if (e.kind == BoundExpr::Kind::Column || e.kind == BoundExpr::Kind::Slot) {
    std::string what = e.kind == BoundExpr::Kind::Column
                           ? fmt::format("column '{}'", schema.attributes(e.column.level)[e.column.index].name)
                           : std::string("this expression");
    throw Error(ErrorCode::GroupingError,
                fmt::format("{} must appear in GROUP BY or be used in an aggregate function", what), e.span);
  }
  BoundExpr out = e;
  for (auto& a : out.args) a = post_aggregate(a, keys, schema);
  return out;
}

std::string output_name(const parser::SelectItem& item) {
  if (item.alias) return *item.alias;
  if (item.expr.kind == Expr::Kind::Column) return item.expr.name;
  return parser::print(item.expr);
}

}  // namespace

std::optional<std::string> source_log(const QueryAst& ast) {
  if (!ast.from) return std::nullopt;
  const parser::Source* s = innermost(*ast.from);
  if (s->kind == parser::Source::Kind::ThisProcess) return std::nullopt;
  return s->name;
}

TypedExpr type_of(const Expr& expr, const store::Schema& schema, Level context) {
  Binder binder(schema, false);
  std::vector<AggCall> aggs;
  Ctx ctx{context == Level::Event ? Scope::Events : Scope::Case, &aggs, false, true, true};
  BoundExpr e = binder.bind(expr, ctx);
  return {e, e.type, e.level};
}

LogicalPlan analyze(const QueryAst& ast, const store::Schema& schema, const std::string& log_id) {
  if (!ast.from) throw Error(ErrorCode::SyntaxError, "a query needs a FROM clause", ast.span);
  LogicalPlan plan;
  plan.schema = schema;
  plan.flattened = ast.from->kind == parser::Source::Kind::Flatten;
  const Scope scope = plan.flattened ? Scope::Flat : Scope::Case;
  Binder binder(schema, plan.flattened);

  for (const auto& def : ast.behaviours) {
    if (plan.flattened) Binder::matches_on_flattened(def.span);
    binder.declare_behaviour(def);
  }

  // WHERE. On the nested view each conjunct is either case-level, an
  // existential event-level condition, or a MATCHES filter.
  std::vector<PatternSpec> pattern_filters;
  std::vector<BoundExpr> case_conjuncts;
  std::vector<BoundExpr> event_conjuncts;
  if (ast.where) {
    std::vector<const Expr*> conjuncts;
    if (plan.flattened) conjuncts.push_back(&*ast.where);
    else split_conjuncts(*ast.where, conjuncts);
    for (const Expr* c : conjuncts) {
      if (c->kind == Expr::Kind::Matches) {
        if (plan.flattened) Binder::matches_on_flattened(c->span);
        pattern_filters.push_back(binder.pattern_spec(*c));
        continue;
      }
      Ctx ctx{scope, nullptr, false, true, true};
      BoundExpr b = binder.bind(*c, ctx);
      require_type(b, ScalarType::Boolean, "WHERE");
      if (b.level == Level::Event) {
        if (contains_kind(b, BoundExpr::Kind::Slot)) {
          throw Error(ErrorCode::LevelError,
                      "an event-level condition cannot be combined with MATCHES or an event subquery in one "
                      "predicate",
                      c->span);
        }
        event_conjuncts.push_back(std::move(b));
      } else {
        case_conjuncts.push_back(std::move(b));
      }
    }
  }
  if (!event_conjuncts.empty()) {
    pattern_filters.push_back(Binder::single_behaviour_spec("$where", conjunction(std::move(event_conjuncts))));
  }

  // SELECT
  std::vector<AggCall> aggs;
  std::vector<BoundExpr> exprs;
  std::vector<std::string> names;
  Ctx sctx{scope, &aggs, false, true, true};
  auto check_level = [&](const BoundExpr& b, Span span) {
    if (b.level == Level::Event) binder.level_error(b, span);
  };
  for (const auto& item : ast.select) {
    if (item.expr.kind == Expr::Kind::Star) {
      std::vector<Level> levels{Level::Case};
      if (plan.flattened) levels.push_back(Level::Event);
      for (Level level : levels) {
        const auto& attrs = schema.attributes(level);
        for (std::size_t i = 0; i < attrs.size(); ++i) {
          exprs.push_back(BoundExpr::make_column({level, i}, attrs[i].type, Level::Case, item.expr.span));
          names.push_back(attrs[i].name);
        }
      }
      continue;
    }
    BoundExpr b = binder.bind(item.expr, sctx);
    check_level(b, item.expr.span);
    exprs.push_back(std::move(b));
    names.push_back(output_name(item));
  }

  // GROUP BY
  std::vector<BoundExpr> keys;
  for (const auto& g : ast.group_by) {
    Ctx gctx{scope, nullptr, false, true, true};
    BoundExpr b = binder.bind(g, gctx);
    check_level(b, g.span);
    keys.push_back(std::move(b));
  }

  // ORDER BY: select aliases and 1-based ordinals refer to output columns.
  std::vector<SortKey> sort_keys;
  for (const auto& o : ast.order_by) {
    std::optional<BoundExpr> key;
    if (o.expr.kind == Expr::Kind::Column) {
      for (std::size_t i = 0; i < ast.select.size() && !key; ++i) {
        if (ast.select[i].alias && iequals(*ast.select[i].alias, o.expr.name)) key = exprs[i];
      }
    } else if (o.expr.kind == Expr::Kind::Literal && o.expr.literal.type() == ScalarType::Number) {
      double v = o.expr.literal.as_number();
      if (std::trunc(v) != v || v < 1 || v > static_cast<double>(exprs.size())) {
        throw Error(ErrorCode::SyntaxError, "ORDER BY position is out of range", o.expr.span);
      }
      key = exprs[static_cast<std::size_t>(v) - 1];
    }
    if (!key) {
      key = binder.bind(o.expr, sctx);
      check_level(*key, o.expr.span);
    }
    sort_keys.push_back({std::move(*key), o.descending});
  }

  const bool grouped = !keys.empty() || !aggs.empty();
  if (grouped) {
    for (auto& e : exprs) e = post_aggregate(e, keys, schema);
    for (auto& k : sort_keys) k.expr = post_aggregate(k.expr, keys, schema);
  }

  // Assemble bottom-up.
  plan.ops.push_back(ScanOp{log_id, std::nullopt, std::nullopt});
  if (plan.flattened) plan.ops.push_back(FlattenOp{});
  for (auto& spec : pattern_filters) plan.ops.push_back(PatternFilterOp{std::move(spec)});
  if (!binder.subqueries_.empty()) plan.ops.push_back(EventSubqueryOp{std::move(binder.subqueries_)});
  for (auto& spec : binder.marks_) plan.ops.push_back(PatternFilterOp{std::move(spec)});
  if (!case_conjuncts.empty()) plan.ops.push_back(FilterOp{conjunction(std::move(case_conjuncts))});
  if (grouped) plan.ops.push_back(AggregateOp{std::move(keys), std::move(aggs)});
  if (!sort_keys.empty()) plan.ops.push_back(SortOp{std::move(sort_keys)});
  for (std::size_t i = 0; i < exprs.size(); ++i) plan.output.push_back({names[i], exprs[i].type});
  plan.ops.push_back(ProjectOp{std::move(exprs), std::move(names)});
  if (ast.limit) plan.ops.push_back(LimitOp{*ast.limit});
  plan.frame_slots = binder.next_slot_;
  return plan;
}

// ---------------------------------------------------------------------------

std::string_view op_name(const PlanOp& op) {
  struct Names {
    std::string_view operator()(const ScanOp&) const { return "Scan"; }
    std::string_view operator()(const FlattenOp&) const { return "Flatten"; }
    std::string_view operator()(const EventSubqueryOp&) const { return "EventSubqueryEval"; }
    std::string_view operator()(const PatternFilterOp&) const { return "PatternFilter"; }
    std::string_view operator()(const FilterOp&) const { return "Filter"; }
    std::string_view operator()(const AggregateOp&) const { return "Aggregate"; }
    std::string_view operator()(const SortOp&) const { return "Sort"; }
    std::string_view operator()(const LimitOp&) const { return "Limit"; }
    std::string_view operator()(const ProjectOp&) const { return "Project"; }
  };
  return std::visit(Names{}, op);
}

namespace {

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += f(items[i]);
  }
  return out;
}

std::string describe_op(const PlanOp& op, const store::Schema& schema) {
  auto expr = [&](const BoundExpr& e) { return describe(e, schema); };
  auto agg = [&](const AggCall& a) { return describe(a, schema); };
  struct V {
    const store::Schema& schema;
    decltype(expr)& ex;
    decltype(agg)& ag;
    std::string operator()(const ScanOp& s) const {
      std::string cols = "*";
      if (s.columns) {
        cols = "[" + join(*s.columns, [&](const store::ColumnId& id) {
                 return fmt::format("{}.{}", id.level == Level::Case ? "case" : "event",
                                    schema.attributes(id.level)[id.index].name);
               }) + "]";
      }
      std::string out = fmt::format("Scan(log={}, columns={}", s.log_id, cols);
      if (s.limit) out += fmt::format(", limit={}", *s.limit);
      return out + ")";
    }
    std::string operator()(const FlattenOp&) const { return "Flatten"; }
    std::string operator()(const EventSubqueryOp& op) const {
      return "EventSubqueryEval(" + join(op.subqueries, [&](const EventSubquery& sq) {
               std::string out = fmt::format("#{} = {} with [{}]", sq.slot, ex(sq.result), join(sq.aggs, ag));
               if (sq.filter) out += " where " + ex(*sq.filter);
               return out;
             }) + ")";
    }
    std::string operator()(const PatternFilterOp& op) const {
      std::string out = fmt::format("PatternFilter(pattern={}, behaviours=[{}]", parser::print(op.spec.pattern),
                                    join(op.spec.behaviours, [&](const pattern::Behaviour& b) {
                                      return fmt::format("{}: {}", b.name, ex(b.predicate));
                                    }));
      if (op.spec.mark_slot) out += fmt::format(", mark=#{}", *op.spec.mark_slot);
      return out + ")";
    }
    std::string operator()(const FilterOp& op) const { return "Filter(" + ex(op.predicate) + ")"; }
    std::string operator()(const AggregateOp& op) const {
      return fmt::format("Aggregate(keys=[{}], aggs=[{}])", join(op.keys, ex), join(op.aggs, ag));
    }
    std::string operator()(const SortOp& op) const {
      return "Sort(" + join(op.keys, [&](const SortKey& k) {
               return ex(k.expr) + (k.descending ? " DESC" : " ASC");
             }) + ")";
    }
    std::string operator()(const LimitOp& op) const { return fmt::format("Limit({})", op.count); }
    std::string operator()(const ProjectOp& op) const {
      std::string out = "Project(";
      for (std::size_t i = 0; i < op.exprs.size(); ++i) {
        if (i) out += ", ";
        out += fmt::format("{} AS {}", ex(op.exprs[i]), op.names[i]);
      }
      return out + ")";
    }
  };
  return std::visit(V{schema, expr, agg}, op);
}

}  // namespace

std::string LogicalPlan::describe() const {
  std::string out;
  std::size_t depth = 0;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it, ++depth) {
    out += std::string(depth * 2, ' ') + describe_op(*it, schema) + "\n";
  }
  return out;
}

}  // namespace signaldb::analyzer
