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

#include "signaldb/ast.hpp"

#include <fmt/format.h>

#include "signaldb/lexer.hpp"

namespace signaldb::parser {

bool is_event_class(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Behaviour:
    case Pattern::Kind::Literal:
    case Pattern::Kind::Any: return true;
    case Pattern::Kind::Not: return is_event_class(p.children.front());
    case Pattern::Kind::Alternation:
      for (const auto& c : p.children) {
        if (!is_event_class(c)) return false;
      }
      return true;
    default: return false;
  }
}

std::string_view binary_op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "AND";
    case BinaryOp::Or: return "OR";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// equality

bool same(const Pattern& a, const Pattern& b) {
  if (a.kind != b.kind || a.name != b.name || a.anchor_start != b.anchor_start || a.anchor_end != b.anchor_end ||
      a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool same(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.negated != b.negated || a.distinct != b.distinct ||
      a.args.size() != b.args.size() || a.subject != b.subject) {
    return false;
  }
  switch (a.kind) {
    case Expr::Kind::Literal:
      if (!(a.literal == b.literal)) return false;
      break;
    case Expr::Kind::Unary:
      if (a.uop != b.uop) return false;
      break;
    case Expr::Kind::Binary:
      if (a.bop != b.bop) return false;
      break;
    case Expr::Kind::Subquery:
      if (!same(*a.subquery, *b.subquery)) return false;
      break;
    case Expr::Kind::Matches:
      if (!same(*a.pattern, *b.pattern)) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same(a.args[i], b.args[i])) return false;
  }
  return true;
}

namespace {

bool same_source(const std::optional<Source>& a, const std::optional<Source>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->kind == Source::Kind::Flatten) return same_source(*a->inner, *b->inner);
  return true;
}

}  // namespace

bool same(const QueryAst& a, const QueryAst& b) {
  if (a.select.size() != b.select.size() || a.behaviours.size() != b.behaviours.size() ||
      a.group_by.size() != b.group_by.size() || a.order_by.size() != b.order_by.size() || a.limit != b.limit ||
      a.where.has_value() != b.where.has_value() || !same_source(a.from, b.from)) {
    return false;
  }
  for (std::size_t i = 0; i < a.select.size(); ++i) {
    if (a.select[i].alias != b.select[i].alias || !same(a.select[i].expr, b.select[i].expr)) return false;
  }
  for (std::size_t i = 0; i < a.behaviours.size(); ++i) {
    if (a.behaviours[i].name != b.behaviours[i].name || !same(a.behaviours[i].expr, b.behaviours[i].expr)) {
      return false;
    }
  }
  if (a.where && !same(*a.where, *b.where)) return false;
  for (std::size_t i = 0; i < a.group_by.size(); ++i) {
    if (!same(a.group_by[i], b.group_by[i])) return false;
  }
  for (std::size_t i = 0; i < a.order_by.size(); ++i) {
    if (a.order_by[i].descending != b.order_by[i].descending || !same(a.order_by[i].expr, b.order_by[i].expr)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// printing

namespace {

std::string quote_string(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

bool plain_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return !is_reserved_word(s);
}

std::string identifier(std::string_view s) {
  if (plain_identifier(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Binding strength of a pattern node: 0 anchored, 1 alternation, 2 sequence,
// 3 repetition, 4 atom.
int strength(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Anchored: return 0;
    case Pattern::Kind::Alternation: return 1;
    case Pattern::Kind::Concat:
    case Pattern::Kind::DirectFollow:
    case Pattern::Kind::EventualFollow: return 2;
    case Pattern::Kind::Repetition: return 3;
    default: return 4;
  }
}

std::string wrap(const Pattern& p, int min_strength) {
  auto s = print(p);
  return strength(p) >= min_strength ? s : "(" + s + ")";
}

}  // namespace

std::string print(const Pattern& p) {
  switch (p.kind) {
    case Pattern::Kind::Behaviour: return identifier(p.name);
    case Pattern::Kind::Literal: return quote_string(p.name);
    case Pattern::Kind::Any: return "ANY";
    case Pattern::Kind::Not: return "NOT " + wrap(p.children[0], 4);
    case Pattern::Kind::Concat:
    case Pattern::Kind::DirectFollow:
    case Pattern::Kind::EventualFollow: {
      std::string_view op = p.kind == Pattern::Kind::Concat ? " " : p.kind == Pattern::Kind::DirectFollow ? " -> " : " ~> ";
      // Sequences associate to the left; a right operand that is itself a
      // sequence needs parentheses.
      return wrap(p.children[0], 2) + std::string(op) + wrap(p.children[1], 3);
    }
    case Pattern::Kind::Alternation: {
      std::string out;
      for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (i) out += " | ";
        out += wrap(p.children[i], 2);
      }
      return out;
    }
    case Pattern::Kind::Repetition: return wrap(p.children[0], 4) + "*";
    case Pattern::Kind::Anchored: {
      std::string body = wrap(p.children[0], 2);
      return fmt::format("({}{}{})", p.anchor_start ? "^ " : "", body, p.anchor_end ? " $" : "");
    }
  }
  return {};
}

namespace {

std::string print_source(const Source& s) {
  switch (s.kind) {
    case Source::Kind::Named: return identifier(s.name);
    case Source::Kind::ThisProcess: return "THIS_PROCESS";
    case Source::Kind::Flatten: return "FLATTEN(" + print_source(*s.inner) + ")";
  }
  return {};
}

std::string print_literal(const Value& v) {
  if (v.is_null()) return "NULL";
  if (v.type() == ScalarType::String) return quote_string(v.as_string());
  if (v.type() == ScalarType::Boolean) return v.as_bool() ? "TRUE" : "FALSE";
  return v.to_string();
}

}  // namespace

std::string print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Column: return identifier(e.name);
    case Expr::Kind::Literal: return print_literal(e.literal);
    case Expr::Kind::Star: return "*";
    case Expr::Kind::Unary:
      return e.uop == UnaryOp::Not ? "(NOT " + print(e.args[0]) + ")" : "(- " + print(e.args[0]) + ")";
    case Expr::Kind::Binary:
      return fmt::format("({} {} {})", print(e.args[0]), binary_op_text(e.bop), print(e.args[1]));
    case Expr::Kind::InList: {
      std::string out = "(" + print(e.args[0]) + (e.negated ? " NOT IN (" : " IN (");
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) out += ", ";
        out += print(e.args[i]);
      }
      return out + "))";
    }
    case Expr::Kind::IsNull: return "(" + print(e.args[0]) + (e.negated ? " IS NOT NULL)" : " IS NULL)");
    case Expr::Kind::Call: {
      std::string out = identifier(e.name) + "(" + (e.distinct ? "DISTINCT " : "");
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += print(e.args[i]);
      }
      return out + ")";
    }
    case Expr::Kind::Subquery: return "(" + print(*e.subquery) + ")";
    case Expr::Kind::Matches:
      return (e.subject ? identifier(*e.subject) + " " : std::string()) + "MATCHES (" + print(*e.pattern) + ")";
  }
  return {};
}

std::string print(const QueryAst& q) {
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    if (i) out += ", ";
    out += print(q.select[i].expr);
    if (q.select[i].alias) out += " AS " + identifier(*q.select[i].alias);
  }
  if (q.from) out += " FROM " + print_source(*q.from);
  for (const auto& b : q.behaviours) out += " BEHAVIOUR (" + print(b.expr) + ") AS " + identifier(b.name);
  if (q.where) out += " WHERE " + print(*q.where);
  if (!q.group_by.empty()) {
    out += " GROUP BY ";
    for (std::size_t i = 0; i < q.group_by.size(); ++i) {
      if (i) out += ", ";
      out += print(q.group_by[i]);
    }
  }
  if (!q.order_by.empty()) {
    out += " ORDER BY ";
    for (std::size_t i = 0; i < q.order_by.size(); ++i) {
      if (i) out += ", ";
      out += print(q.order_by[i].expr) + (q.order_by[i].descending ? " DESC" : " ASC");
    }
  }
  if (q.limit) out += fmt::format(" LIMIT {}", *q.limit);
  return out;
}

}  // namespace signaldb::parser
