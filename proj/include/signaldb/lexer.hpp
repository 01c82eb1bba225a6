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

#include <string>
#include <string_view>
#include <vector>

#include "signaldb/error.hpp"

namespace signaldb::parser {

enum class TokenKind {
  Keyword,          // text is upper-cased
  Identifier,       // text keeps its spelling
  QuotedIdentifier, // text is the unescaped content of "..."
  String,           // text is the unescaped content of '...'
  Number,           // text is the literal spelling
  Symbol,           // ( ) , ; * + - / = <> != < <= > >= -> ~> | ^ $
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  Span span;

  bool is_keyword(std::string_view kw) const { return kind == TokenKind::Keyword && text == kw; }
  bool is_symbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
  bool is_identifier() const { return kind == TokenKind::Identifier || kind == TokenKind::QuotedIdentifier; }
};

bool is_reserved_word(std::string_view word);

/// Splits query text into tokens; the last token is always End. Keywords are
/// case-insensitive. `--` starts a comment running to the end of the line.
/// Throws UnterminatedString or IllegalCharacter.
std::vector<Token> tokenize(std::string_view text);

}  // namespace signaldb::parser
