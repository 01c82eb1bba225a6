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
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace signaldb {

enum class ScalarType { Boolean, Number, String, Timestamp, Duration };

std::string_view type_name(ScalarType t);
std::optional<ScalarType> parse_type_name(std::string_view name);

/// True for the types stored physically as int64 milliseconds.
inline bool is_temporal(ScalarType t) {
  return t == ScalarType::Timestamp || t == ScalarType::Duration;
}

/// A typed scalar or NULL.
///
/// Timestamps are epoch milliseconds, Durations are signed milliseconds; both
/// live in the int64 alternative. Numbers are doubles and never NaN.
class Value {
 public:
  using Payload = std::variant<std::monostate, bool, double, std::int64_t, std::string>;

  Value() = default;
  static Value null(ScalarType t) { return Value(t, std::monostate{}); }
  static Value boolean(bool b) { return Value(ScalarType::Boolean, b); }
  static Value number(double d) { return Value(ScalarType::Number, d); }
  static Value string(std::string s) { return Value(ScalarType::String, std::move(s)); }
  static Value timestamp(std::int64_t ms) { return Value(ScalarType::Timestamp, ms); }
  static Value duration(std::int64_t ms) { return Value(ScalarType::Duration, ms); }

  ScalarType type() const { return type_; }
  bool is_null() const { return std::holds_alternative<std::monostate>(payload_); }

  bool as_bool() const { return std::get<bool>(payload_); }
  double as_number() const { return std::get<double>(payload_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(payload_); }
  const std::string& as_string() const { return std::get<std::string>(payload_); }

  const Payload& payload() const { return payload_; }

  /// Human-readable rendering; NULL renders as "NULL".
  std::string to_string() const;

  /// Same type and same payload. NULL equals NULL here (this is identity,
  /// not SQL comparison).
  friend bool operator==(const Value& a, const Value& b) {
    return a.type_ == b.type_ && a.payload_ == b.payload_;
  }

 private:
  Value(ScalarType t, Payload p) : type_(t), payload_(std::move(p)) {}

  ScalarType type_ = ScalarType::String;
  Payload payload_;
};

}  // namespace signaldb
