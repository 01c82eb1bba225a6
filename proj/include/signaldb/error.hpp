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
#include <stdexcept>
#include <string>
#include <string_view>

namespace signaldb {

// Stable error codes. The string spelling returned by error_code_name() is
// part of the wire contract (HTTP responses, CLI diagnostics).
enum class ErrorCode {
  // catalog / store
  DuplicateLogId,
  InvalidSchema,
  UnknownLog,
  EmptyCase,
  TypeMismatch,
  DuplicateCaseId,
  MissingRequiredField,
  UnknownColumn,
  // ingestion
  MissingHeader,
  MalformedCsv,
  UnparseableTimestamp,
  MissingRequiredValue,
  InconsistentCaseAttribute,
  MalformedXml,
  MissingConceptName,
  MissingTimestamp,
  InvalidConfig,
  // lexer / parser
  UnterminatedString,
  IllegalCharacter,
  SyntaxError,
  MisplacedAnchor,
  InvalidNotOperand,
  // analyzer
  TypeError,
  LevelError,
  NonAggregatedSubquery,
  NonBooleanBehaviour,
  MatchesOnFlattened,
  UnknownBehaviour,
  DuplicateBehaviour,
  InvalidAggregate,
  UnknownFunction,
  GroupingError,
  NoCurrentProcess,
  // executor
  SnapshotColumnMissing,
  EvaluationError,
  ResourceLimitExceeded,
  // misc
  IoError,
  InvalidRequest,
  Internal,
};

std::string_view error_code_name(ErrorCode code);

/// Half-open byte range [begin, end) into the query text. Both zero when the
/// error has no source position.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool empty() const { return begin == end; }
  friend bool operator==(const Span&, const Span&) = default;
};

/// The single exception type raised by the library. Carries a stable code,
/// an optional source span, and a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, Span span = {})
      : std::runtime_error(std::move(message)), code_(code), span_(span) {}

  ErrorCode code() const { return code_; }
  const Span& span() const { return span_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
  Span span_;
};

/// Structured rendering of an Error, used by the API layer.
struct Diagnostic {
  ErrorCode code = ErrorCode::Internal;
  std::string message;
  Span span;

  static Diagnostic from(const Error& e) { return {e.code(), e.what(), e.span()}; }
};

/// Formats a diagnostic against its source text with a caret line under the
/// offending span.
std::string render_diagnostic(const Diagnostic& diag, std::string_view source);

}  // namespace signaldb
