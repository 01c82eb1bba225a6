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
#include <vector>

#include "signaldb/error.hpp"
#include "signaldb/value.hpp"

namespace signaldb::parser {

/// Owning pointer with value semantics, for recursive AST members.
template <typename T>
class Box {
 public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& o) : ptr_(o.ptr_ ? std::make_unique<T>(*o.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& o) {
    if (this != &o) ptr_ = o.ptr_ ? std::make_unique<T>(*o.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  explicit operator bool() const { return ptr_ != nullptr; }
  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

// ---------------------------------------------------------------------------
// Patterns

struct Pattern {
  enum class Kind {
    Behaviour,       // named behaviour atom
    Literal,         // string-literal atom
    Any,             // ANY
    Not,             // NOT <class>
    Concat,          // juxtaposition
    DirectFollow,    // ->
    EventualFollow,  // ~>
    Alternation,     // |
    Repetition,      // *
    Anchored,        // ^ ... $ (either or both)
  };

  Kind kind = Kind::Any;
  std::string name;  // Behaviour name or Literal text
  bool anchor_start = false;
  bool anchor_end = false;
  std::vector<Pattern> children;
  Span span;

  static Pattern behaviour(std::string name) { return {Kind::Behaviour, std::move(name), false, false, {}, {}}; }
  static Pattern literal(std::string text) { return {Kind::Literal, std::move(text), false, false, {}, {}}; }
  static Pattern any() { return {Kind::Any, {}, false, false, {}, {}}; }
  static Pattern negate(Pattern p) { return {Kind::Not, {}, false, false, {std::move(p)}, {}}; }
  static Pattern binary(Kind k, Pattern l, Pattern r) { return {k, {}, false, false, {std::move(l), std::move(r)}, {}}; }
  static Pattern alternation(std::vector<Pattern> branches) {
    return {Kind::Alternation, {}, false, false, std::move(branches), {}};
  }
  static Pattern star(Pattern p) { return {Kind::Repetition, {}, false, false, {std::move(p)}, {}}; }
  static Pattern anchored(Pattern p, bool start, bool end) {
    return {Kind::Anchored, {}, start, end, {std::move(p)}, {}};
  }
};

/// True when `p` denotes a single-event class: an atom, a NOT of a class, or
/// an alternation of classes.
bool is_event_class(const Pattern& p);

// ---------------------------------------------------------------------------
// Expressions

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view binary_op_text(BinaryOp op);

struct QueryAst;

struct Expr {
  enum class Kind {
    Column,    // name
    Literal,   // literal
    Star,      // `*` in COUNT(*) or the select list
    Unary,     // uop, args[0]
    Binary,    // bop, args[0], args[1]
    InList,    // args[0] IN (args[1..]); negated for NOT IN
    IsNull,    // args[0] IS [NOT] NULL
    Call,      // name(args), distinct
    Subquery,  // subquery
    Matches,   // [subject] MATCHES (pattern)
  };

  Kind kind = Kind::Literal;
  std::string name;
  Value literal;
  UnaryOp uop = UnaryOp::Not;
  BinaryOp bop = BinaryOp::Add;
  bool negated = false;
  bool distinct = false;
  std::vector<Expr> args;
  Box<QueryAst> subquery;
  std::optional<std::string> subject;
  Box<Pattern> pattern;
  Span span;
};

struct Source {
  enum class Kind { Named, ThisProcess, Flatten };
  Kind kind = Kind::Named;
  std::string name;
  Box<Source> inner;
  Span span;
};

struct SelectItem {
  Expr expr;
  std::optional<std::string> alias;
};

struct BehaviourDef {
  Expr expr;
  std::string name;
  Span span;
};

struct OrderItem {
  Expr expr;
  bool descending = false;
};

struct QueryAst {
  std::vector<SelectItem> select;
  std::optional<Source> from;  // absent only for event-level subqueries
  std::vector<BehaviourDef> behaviours;
  std::optional<Expr> where;
  std::vector<Expr> group_by;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;
  Span span;
};

// Structural equality ignoring source spans.
bool same(const Pattern& a, const Pattern& b);
bool same(const Expr& a, const Expr& b);
bool same(const QueryAst& a, const QueryAst& b);

// Canonical text that parses back to a structurally equal tree.
std::string print(const Pattern& p);
std::string print(const Expr& e);
std::string print(const QueryAst& q);

}  // namespace signaldb::parser
