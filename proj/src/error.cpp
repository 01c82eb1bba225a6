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

#include "signaldb/error.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace signaldb {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateLogId: return "DuplicateLogId";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::UnknownLog: return "UnknownLog";
    case ErrorCode::EmptyCase: return "EmptyCase";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::DuplicateCaseId: return "DuplicateCaseId";
    case ErrorCode::MissingRequiredField: return "MissingRequiredField";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::UnparseableTimestamp: return "UnparseableTimestamp";
    case ErrorCode::MissingRequiredValue: return "MissingRequiredValue";
    case ErrorCode::InconsistentCaseAttribute: return "InconsistentCaseAttribute";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::MissingConceptName: return "MissingConceptName";
    case ErrorCode::MissingTimestamp: return "MissingTimestamp";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MisplacedAnchor: return "MisplacedAnchor";
    case ErrorCode::InvalidNotOperand: return "InvalidNotOperand";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::LevelError: return "LevelError";
    case ErrorCode::NonAggregatedSubquery: return "NonAggregatedSubquery";
    case ErrorCode::NonBooleanBehaviour: return "NonBooleanBehaviour";
    case ErrorCode::MatchesOnFlattened: return "MatchesOnFlattened";
    case ErrorCode::UnknownBehaviour: return "UnknownBehaviour";
    case ErrorCode::DuplicateBehaviour: return "DuplicateBehaviour";
    case ErrorCode::InvalidAggregate: return "InvalidAggregate";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::GroupingError: return "GroupingError";
    case ErrorCode::NoCurrentProcess: return "NoCurrentProcess";
    case ErrorCode::SnapshotColumnMissing: return "SnapshotColumnMissing";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::ResourceLimitExceeded: return "ResourceLimitExceeded";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

std::string render_diagnostic(const Diagnostic& diag, std::string_view source) {
  std::string out = fmt::format("error[{}]: {}", error_code_name(diag.code), diag.message);
  if (diag.span.empty() && diag.span.begin == 0) return out;
  if (diag.span.begin > source.size()) return out;

  std::size_t line_begin = 0;
  if (diag.span.begin > 0) {
    std::size_t nl = source.rfind('\n', diag.span.begin - 1);
    if (nl != std::string_view::npos) line_begin = nl + 1;
  }
  std::size_t line_end = source.find('\n', diag.span.begin);
  if (line_end == std::string_view::npos) line_end = source.size();

  std::size_t line_no = static_cast<std::size_t>(std::count(source.begin(), source.begin() + line_begin, '\n')) + 1;
  std::size_t col = diag.span.begin - line_begin;
  std::size_t width = std::max<std::size_t>(1, std::min(diag.span.end, line_end) - std::min(diag.span.begin, line_end));

  out += fmt::format("\n  --> line {}, column {}\n  | {}\n  | {}{}", line_no, col + 1,
                     source.substr(line_begin, line_end - line_begin), std::string(col, ' '),
                     std::string(width, '^'));
  return out;
}

}  // namespace signaldb
