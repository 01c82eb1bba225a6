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

#include "signaldb/value.hpp"

#include <charconv>

#include "signaldb/store.hpp"

namespace signaldb {

std::string_view type_name(ScalarType t) {
  switch (t) {
    case ScalarType::Boolean: return "Boolean";
    case ScalarType::Number: return "Number";
    case ScalarType::String: return "String";
    case ScalarType::Timestamp: return "Timestamp";
    case ScalarType::Duration: return "Duration";
  }
  return "String";
}

std::optional<ScalarType> parse_type_name(std::string_view name) {
  for (auto t : {ScalarType::Boolean, ScalarType::Number, ScalarType::String, ScalarType::Timestamp,
                 ScalarType::Duration}) {
    if (store::iequals(type_name(t), name)) return t;
  }
  return std::nullopt;
}

std::string Value::to_string() const {
  if (is_null()) return "NULL";
  switch (type_) {
    case ScalarType::Boolean: return as_bool() ? "true" : "false";
    case ScalarType::Number: {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, as_number());
      return std::string(buf, res.ptr);
    }
    case ScalarType::String: return as_string();
    case ScalarType::Timestamp:
    case ScalarType::Duration: return std::to_string(as_int());
  }
  return {};
}

}  // namespace signaldb
