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

#include "signaldb/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <fmt/format.h>

#include "signaldb/store.hpp"

namespace signaldb::parser {

namespace {

constexpr std::array kKeywords = {
    "SELECT", "FROM",  "WHERE", "GROUP",   "BY",        "ORDER",        "ASC",     "DESC",
    "LIMIT",  "AS",    "AND",   "OR",      "NOT",       "IN",           "IS",      "NULL",
    "TRUE",   "FALSE", "MATCHES", "BEHAVIOUR", "BEHAVIOR", "ANY",       "THIS_PROCESS", "FLATTEN",
    "DISTINCT",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

bool is_reserved_word(std::string_view word) {
  auto u = upper(word);
  return std::find(kKeywords.begin(), kKeywords.end(), u) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && text[i + 1] == '-') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < n && ident_char(text[i])) ++i;
      auto word = text.substr(start, i - start);
      if (is_reserved_word(word)) {
        out.push_back({TokenKind::Keyword, upper(word), {start, i}});
      } else {
        out.push_back({TokenKind::Identifier, std::string(word), {start, i}});
      }
      continue;
    }
    if (digit(c) || (c == '.' && i + 1 < n && digit(text[i + 1]))) {
      while (i < n && digit(text[i])) ++i;
      if (i < n && text[i] == '.') {
        ++i;
        while (i < n && digit(text[i])) ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < n && digit(text[j])) {
          i = j;
          while (i < n && digit(text[i])) ++i;
        }
      }
      if (i < n && ident_start(text[i])) {
        throw Error(ErrorCode::IllegalCharacter, fmt::format("unexpected character '{}' after number", text[i]),
                    {i, i + 1});
      }
      out.push_back({TokenKind::Number, std::string(text.substr(start, i - start)), {start, i}});
      continue;
    }
    if (c == '\'' || c == '"') {
      const char quote = c;
      std::string value;
      ++i;
      bool closed = false;
      while (i < n) {
        if (text[i] == quote) {
          if (i + 1 < n && text[i + 1] == quote) {
            value.push_back(quote);
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        value.push_back(text[i++]);
      }
      if (!closed) {
        throw Error(ErrorCode::UnterminatedString,
                    quote == '\'' ? "unterminated string literal" : "unterminated quoted identifier", {start, n});
      }
      if (quote == '"' && value.empty()) {
        throw Error(ErrorCode::SyntaxError, "empty quoted identifier", {start, i});
      }
      out.push_back({quote == '\'' ? TokenKind::String : TokenKind::QuotedIdentifier, std::move(value), {start, i}});
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "<>" || two == "!=" || two == "<=" || two == ">=" || two == "->" || two == "~>") {
      out.push_back({TokenKind::Symbol, std::string(two), {i, i + 2}});
      i += 2;
      continue;
    }
    if (std::string_view("(),;*+-/=<>|^$").find(c) != std::string_view::npos) {
      out.push_back({TokenKind::Symbol, std::string(1, c), {i, i + 1}});
      ++i;
      continue;
    }
    auto shown = std::isprint(static_cast<unsigned char>(c)) ? fmt::format("'{}'", c)
                                                             : fmt::format("byte 0x{:02x}", static_cast<unsigned char>(c));
    throw Error(ErrorCode::IllegalCharacter, fmt::format("illegal character {}", shown), {i, i + 1});
  }
  out.push_back({TokenKind::End, "", {n, n}});
  return out;
}

}  // namespace signaldb::parser
