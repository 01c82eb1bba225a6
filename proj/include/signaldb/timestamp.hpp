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

namespace signaldb::ts {

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d);

/// Integer epoch milliseconds, optionally signed. No whitespace.
std::optional<std::int64_t> parse_epoch_millis(std::string_view text);

/// ISO-8601 date or date-time: `YYYY-MM-DD`, optionally followed by `T` or a
/// space, `HH:MM[:SS[.fff…]]`, and `Z` or `±HH[:MM]`. No offset means UTC.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

/// strptime-like pattern with %Y %m %d %H %M %S %f (fractional seconds) %z
/// and %%; every other character must match literally. UTC unless %z.
std::optional<std::int64_t> parse_with_pattern(std::string_view text, std::string_view pattern);

/// Renders epoch millis as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
std::string format_iso8601(std::int64_t millis);

}  // namespace signaldb::ts
