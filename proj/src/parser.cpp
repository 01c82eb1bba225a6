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

#include "signaldb/parser.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace signaldb::parser {

namespace {

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::End) {
      throw Error(ErrorCode::Internal, "token stream must end with an End token");
    }
  }

  QueryAst query_statement() {
    QueryAst q = query(false);
    while (peek().is_symbol(";")) advance();
    expect_end();
    return q;
  }

  Pattern pattern_statement() {
    Pattern p = pattern();
    expect_end();
    validate_pattern(p);
    return p;
  }

 private:
  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    last_end_ = t.span.end;
    return t;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) return false;
    advance();
    return true;
  }
  bool accept_symbol(std::string_view s) {
    if (!peek().is_symbol(s)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(std::string_view expected) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : fmt::format("'{}'", t.text);
    throw Error(ErrorCode::SyntaxError, fmt::format("expected {}, found {}", expected, found), t.span);
  }

  const Token& expect_keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) fail(kw);
    return advance();
  }
  const Token& expect_symbol(std::string_view s) {
    if (!peek().is_symbol(s)) fail(fmt::format("'{}'", s));
    return advance();
  }
  const Token& expect_identifier(std::string_view what = "identifier") {
    if (!peek().is_identifier()) fail(what);
    return advance();
  }
  void expect_end() {
    if (peek().kind != TokenKind::End) fail("end of query");
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth) {
        throw Error(ErrorCode::SyntaxError, "expression nested too deeply", parser.peek().span);
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  // -- queries --------------------------------------------------------------

  QueryAst query(bool subquery) {
    DepthGuard guard(*this);
    QueryAst q;
    const std::size_t begin = peek().span.begin;
    expect_keyword("SELECT");
    do {
      SelectItem item;
      if (peek().is_symbol("*")) {
        item.expr.kind = Expr::Kind::Star;
        item.expr.span = advance().span;
      } else {
        item.expr = expr();
      }
      if (accept_keyword("AS")) {
        item.alias = expect_identifier("alias").text;
      } else if (peek().kind == TokenKind::Identifier) {
        item.alias = advance().text;
      }
      q.select.push_back(std::move(item));
    } while (accept_symbol(","));

    if (subquery) {
      if (accept_keyword("FROM")) q.from = source();
    } else {
      expect_keyword("FROM");
      q.from = source();
    }
    behaviour_clauses(q);
    if (accept_keyword("WHERE")) {
      behaviour_clauses(q);
      q.where = expr();
    }
    if (!subquery) {
      if (accept_keyword("GROUP")) {
        expect_keyword("BY");
        do q.group_by.push_back(expr());
        while (accept_symbol(","));
      }
      if (accept_keyword("ORDER")) {
        expect_keyword("BY");
        do {
          OrderItem item{expr(), false};
          if (accept_keyword("DESC")) {
            item.descending = true;
          } else {
            accept_keyword("ASC");
          }
          q.order_by.push_back(std::move(item));
        } while (accept_symbol(","));
      }
      if (accept_keyword("LIMIT")) {
        const Token& t = peek();
        std::int64_t n = -1;
        if (t.kind == TokenKind::Number) {
          auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
          if (ec != std::errc() || ptr != t.text.data() + t.text.size()) n = -1;
        }
        if (n < 0) fail("non-negative integer after LIMIT");
        advance();
        q.limit = n;
      }
    }
    q.span = {begin, last_end_};
    return q;
  }

  void behaviour_clauses(QueryAst& q) {
    while (peek().is_keyword("BEHAVIOUR") || peek().is_keyword("BEHAVIOR")) {
      BehaviourDef def;
      const std::size_t begin = advance().span.begin;
      expect_symbol("(");
      def.expr = expr();
      expect_symbol(")");
      expect_keyword("AS");
      const Token& name = expect_identifier("behaviour name");
      def.name = name.text;
      def.span = {begin, name.span.end};
      q.behaviours.push_back(std::move(def));
    }
  }

  Source source() {
    DepthGuard guard(*this);
    Source s;
    const Token& t = peek();
    if (t.is_keyword("THIS_PROCESS")) {
      s.kind = Source::Kind::ThisProcess;
      s.span = advance().span;
    } else if (t.is_keyword("FLATTEN")) {
      advance();
      expect_symbol("(");
      s.kind = Source::Kind::Flatten;
      s.inner = source();
      const Token& close = expect_symbol(")");
      s.span = {t.span.begin, close.span.end};
    } else if (t.is_identifier()) {
      s.kind = Source::Kind::Named;
      s.name = t.text;
      s.span = advance().span;
    } else {
      fail("log name, THIS_PROCESS or FLATTEN");
    }
    return s;
  }

  // -- expressions ----------------------------------------------------------

  Expr expr() { return or_expr(); }

  static Expr make_binary(BinaryOp op, Expr l, Expr r) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.bop = op;
    e.span = {l.span.begin, r.span.end};
    e.args.push_back(std::move(l));
    e.args.push_back(std::move(r));
    return e;
  }

  Expr or_expr() {
    DepthGuard guard(*this);
    Expr e = and_expr();
    while (accept_keyword("OR")) e = make_binary(BinaryOp::Or, std::move(e), and_expr());
    return e;
  }

  Expr and_expr() {
    Expr e = not_expr();
    while (accept_keyword("AND")) e = make_binary(BinaryOp::And, std::move(e), not_expr());
    return e;
  }

  Expr not_expr() {
    DepthGuard guard(*this);
    if (peek().is_keyword("NOT")) {
      const Token& t = advance();
      Expr inner = not_expr();
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.uop = UnaryOp::Not;
      e.span = {t.span.begin, inner.span.end};
      e.args.push_back(std::move(inner));
      return e;
    }
    return comparison();
  }

  Expr comparison() {
    Expr left = additive();
    const Token& t = peek();
    static constexpr std::pair<std::string_view, BinaryOp> kOps[] = {
        {"=", BinaryOp::Eq}, {"<>", BinaryOp::Ne}, {"!=", BinaryOp::Ne}, {"<", BinaryOp::Lt},
        {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}};
    for (const auto& [sym, op] : kOps) {
      if (t.is_symbol(sym)) {
        advance();
        return make_binary(op, std::move(left), additive());
      }
    }
    bool negated = false;
    if (t.is_keyword("NOT") && peek(1).is_keyword("IN")) {
      advance();
      negated = true;
    }
    if (accept_keyword("IN")) {
      Expr e;
      e.kind = Expr::Kind::InList;
      e.negated = negated;
      expect_symbol("(");
      e.args.push_back(std::move(left));
      do e.args.push_back(expr());
      while (accept_symbol(","));
      const Token& close = expect_symbol(")");
      e.span = {e.args.front().span.begin, close.span.end};
      return e;
    }
    if (accept_keyword("IS")) {
      Expr e;
      e.kind = Expr::Kind::IsNull;
      e.negated = accept_keyword("NOT");
      const Token& null_tok = expect_keyword("NULL");
      e.span = {left.span.begin, null_tok.span.end};
      e.args.push_back(std::move(left));
      return e;
    }
    return left;
  }

  Expr additive() {
    Expr e = multiplicative();
    for (;;) {
      if (accept_symbol("+")) {
        e = make_binary(BinaryOp::Add, std::move(e), multiplicative());
      } else if (accept_symbol("-")) {
        e = make_binary(BinaryOp::Sub, std::move(e), multiplicative());
      } else {
        return e;
      }
    }
  }

  Expr multiplicative() {
    Expr e = unary();
    for (;;) {
      if (accept_symbol("*")) {
        e = make_binary(BinaryOp::Mul, std::move(e), unary());
      } else if (accept_symbol("/")) {
        e = make_binary(BinaryOp::Div, std::move(e), unary());
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    DepthGuard guard(*this);
    if (peek().is_symbol("-")) {
      const Token& t = advance();
      Expr inner = unary();
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.uop = UnaryOp::Neg;
      e.span = {t.span.begin, inner.span.end};
      e.args.push_back(std::move(inner));
      return e;
    }
    return primary();
  }

  Expr matches(std::optional<std::string> subject, std::size_t begin) {
    expect_keyword("MATCHES");
    expect_symbol("(");
    Pattern p = pattern();
    const Token& close = expect_symbol(")");
    validate_pattern(p);
    Expr e;
    e.kind = Expr::Kind::Matches;
    e.subject = std::move(subject);
    e.pattern = std::move(p);
    e.span = {begin, close.span.end};
    return e;
  }

  Expr primary() {
    DepthGuard guard(*this);
    const Token& t = peek();
    Expr e;
    e.span = t.span;
    switch (t.kind) {
      case TokenKind::Number: {
        double v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || !std::isfinite(v)) fail("finite number");
        advance();
        e.kind = Expr::Kind::Literal;
        e.literal = Value::number(v);
        return e;
      }
      case TokenKind::String:
        advance();
        e.kind = Expr::Kind::Literal;
        e.literal = Value::string(t.text);
        return e;
      case TokenKind::Keyword:
        if (t.text == "TRUE" || t.text == "FALSE") {
          advance();
          e.kind = Expr::Kind::Literal;
          e.literal = Value::boolean(t.text == "TRUE");
          return e;
        }
        if (t.text == "NULL") {
          advance();
          e.kind = Expr::Kind::Literal;
          e.literal = Value::null(ScalarType::String);
          return e;
        }
        if (t.text == "MATCHES") return matches(std::nullopt, t.span.begin);
        fail("expression");
      case TokenKind::Identifier:
      case TokenKind::QuotedIdentifier: {
        advance();
        if (t.kind == TokenKind::Identifier && peek().is_symbol("(")) return call(t);
        if (peek().is_keyword("MATCHES")) return matches(t.text, t.span.begin);
        e.kind = Expr::Kind::Column;
        e.name = t.text;
        return e;
      }
      case TokenKind::Symbol:
        if (t.is_symbol("(")) {
          advance();
          if (peek().is_keyword("SELECT")) {
            QueryAst sub = query(true);
            const Token& close = expect_symbol(")");
            e.kind = Expr::Kind::Subquery;
            e.span = {t.span.begin, close.span.end};
            e.subquery = std::move(sub);
            return e;
          }
          Expr inner = expr();
          expect_symbol(")");
          return inner;
        }
        fail("expression");
      case TokenKind::End: fail("expression");
    }
    fail("expression");
  }

  Expr call(const Token& name) {
    Expr e;
    e.kind = Expr::Kind::Call;
    e.name = name.text;
    expect_symbol("(");
    if (peek().is_keyword("SELECT")) {
      // AGG(SELECT ...) is shorthand for AGG((SELECT ...)).
      Expr sub;
      sub.kind = Expr::Kind::Subquery;
      const std::size_t begin = peek().span.begin;
      sub.subquery = query(true);
      sub.span = {begin, last_end_};
      e.args.push_back(std::move(sub));
    } else if (peek().is_symbol("*")) {
      Expr star;
      star.kind = Expr::Kind::Star;
      star.span = advance().span;
      e.args.push_back(std::move(star));
    } else if (!peek().is_symbol(")")) {
      e.distinct = accept_keyword("DISTINCT");
      do e.args.push_back(expr());
      while (accept_symbol(","));
    }
    const Token& close = expect_symbol(")");
    e.span = {name.span.begin, close.span.end};
    return e;
  }

  // -- patterns -------------------------------------------------------------

  bool starts_atom() const {
    const Token& t = peek();
    return t.kind == TokenKind::String || t.is_identifier() || t.is_keyword("ANY") || t.is_keyword("NOT") ||
           t.is_symbol("(");
  }

  // An alternation whose branches may each carry ^ and $.
  Pattern pattern() {
    DepthGuard guard(*this);
    Pattern first = anchored_sequence();
    if (!peek().is_symbol("|")) return first;
    std::vector<Pattern> branches;
    branches.push_back(std::move(first));
    while (accept_symbol("|")) branches.push_back(anchored_sequence());
    Span span{branches.front().span.begin, branches.back().span.end};
    Pattern p = Pattern::alternation(std::move(branches));
    p.span = span;
    return p;
  }

  Pattern anchored_sequence() {
    const std::size_t begin = peek().span.begin;
    bool start = accept_symbol("^");
    Pattern body = sequence();
    bool end = false;
    std::size_t stop = body.span.end;
    if (peek().is_symbol("$")) {
      stop = advance().span.end;
      end = true;
    }
    if (!start && !end) return body;
    Pattern p = Pattern::anchored(std::move(body), start, end);
    p.span = {begin, stop};
    return p;
  }

  Pattern sequence() {
    Pattern left = repetition();
    for (;;) {
      Pattern::Kind kind;
      if (accept_symbol("->")) {
        kind = Pattern::Kind::DirectFollow;
      } else if (accept_symbol("~>")) {
        kind = Pattern::Kind::EventualFollow;
      } else if (starts_atom()) {
        kind = Pattern::Kind::Concat;
      } else {
        return left;
      }
      Pattern right = repetition();
      Span span{left.span.begin, right.span.end};
      left = Pattern::binary(kind, std::move(left), std::move(right));
      left.span = span;
    }
  }

  Pattern repetition() {
    Pattern p = atom();
    while (peek().is_symbol("*")) {
      Span span{p.span.begin, advance().span.end};
      p = Pattern::star(std::move(p));
      p.span = span;
    }
    return p;
  }

  Pattern atom() {
    DepthGuard guard(*this);
    const Token& t = peek();
    if (t.kind == TokenKind::String) {
      advance();
      Pattern p = Pattern::literal(t.text);
      p.span = t.span;
      return p;
    }
    if (t.is_identifier()) {
      advance();
      Pattern p = Pattern::behaviour(t.text);
      p.span = t.span;
      return p;
    }
    if (t.is_keyword("ANY")) {
      advance();
      Pattern p = Pattern::any();
      p.span = t.span;
      return p;
    }
    if (t.is_keyword("NOT")) {
      advance();
      Pattern operand = atom();
      if (!is_event_class(operand)) {
        throw Error(ErrorCode::InvalidNotOperand,
                    "NOT applies to a single event class (an atom or an alternation of atoms)", operand.span);
      }
      Span span{t.span.begin, operand.span.end};
      Pattern p = Pattern::negate(std::move(operand));
      p.span = span;
      return p;
    }
    if (t.is_symbol("(")) {
      advance();
      Pattern inner = pattern();
      expect_symbol(")");
      return inner;
    }
    fail("pattern atom (string, behaviour name, ANY, NOT or '(')");
  }

  // Anchored groups may only sit at the root or, recursively, as a branch of
  // a root-level alternation.
  static void validate_pattern(const Pattern& p, bool anchor_allowed = true) {
    switch (p.kind) {
      case Pattern::Kind::Anchored:
        if (!anchor_allowed) {
          throw Error(ErrorCode::MisplacedAnchor,
                      "^ and $ may only anchor the whole pattern or a top-level alternative", p.span);
        }
        validate_pattern(p.children.front(), true);
        return;
      case Pattern::Kind::Alternation:
        for (const auto& c : p.children) validate_pattern(c, anchor_allowed);
        return;
      default:
        for (const auto& c : p.children) validate_pattern(c, false);
        return;
    }
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::size_t last_end_ = 0;
};

}  // namespace

QueryAst parse_query(std::span<const Token> tokens) { return Parser(tokens).query_statement(); }
Pattern parse_pattern(std::span<const Token> tokens) { return Parser(tokens).pattern_statement(); }

QueryAst parse_query(std::string_view text) {
  auto tokens = tokenize(text);
  return parse_query(tokens);
}

Pattern parse_pattern(std::string_view text) {
  auto tokens = tokenize(text);
  return parse_pattern(tokens);
}

std::vector<std::string> split_statements(std::string_view script) {
  std::vector<std::string> out;
  std::string current;
  char quote = 0;
  bool comment = false;
  for (std::size_t i = 0; i < script.size(); ++i) {
    char c = script[i];
    if (comment) {
      if (c == '\n') comment = false;
      current.push_back(c);
      continue;
    }
    if (quote) {
      current.push_back(c);
      if (c == quote) quote = 0;  // doubled quotes re-open on the next char
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '-' && i + 1 < script.size() && script[i + 1] == '-') {
      comment = true;
    } else if (c == ';') {
      out.push_back(current);
      current.clear();
      continue;
    }
    current.push_back(c);
  }
  out.push_back(current);
  std::vector<std::string> nonblank;
  for (auto& s : out) {
    // Keep statements that contain something besides whitespace and comments.
    bool content = false;
    bool in_comment = false;
    for (std::size_t i = 0; i < s.size() && !content; ++i) {
      if (in_comment) {
        if (s[i] == '\n') in_comment = false;
      } else if (s[i] == '-' && i + 1 < s.size() && s[i + 1] == '-') {
        in_comment = true;
      } else if (!std::isspace(static_cast<unsigned char>(s[i]))) {
        content = true;
      }
    }
    if (content) nonblank.push_back(std::move(s));
  }
  return nonblank;
}

}  // namespace signaldb::parser
