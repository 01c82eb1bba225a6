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

#include <span>
#include <string_view>

#include "signaldb/ast.hpp"
#include "signaldb/lexer.hpp"

namespace signaldb::parser {

/// Parses one query from a token stream (trailing `;` allowed). Throws
/// SyntaxError with the offending token's span and the expected set.
QueryAst parse_query(std::span<const Token> tokens);

/// Parses a bare pattern (the text between the parentheses of MATCHES).
/// Throws SyntaxError, MisplacedAnchor or InvalidNotOperand.
Pattern parse_pattern(std::span<const Token> tokens);

QueryAst parse_query(std::string_view text);
Pattern parse_pattern(std::string_view text);

/// Splits a script into statements at top-level `;`, ignoring semicolons in
/// strings, quoted identifiers and comments. Blank statements are dropped.
std::vector<std::string> split_statements(std::string_view script);

}  // namespace signaldb::parser
