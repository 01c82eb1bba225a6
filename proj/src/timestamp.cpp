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

#include "signaldb/timestamp.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace signaldb::ts {

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

namespace {

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

struct Fields {
  std::int64_t year = 1970;
  unsigned month = 1, day = 1, hour = 0, minute = 0, second = 0;
  std::int64_t millis = 0;
  std::int64_t offset_minutes = 0;
};

// Reads exactly `n` digits.
bool read_digits(std::string_view s, std::size_t& pos, int n, unsigned& out) {
  if (pos + static_cast<std::size_t>(n) > s.size()) return false;
  unsigned v = 0;
  for (int i = 0; i < n; ++i) {
    char c = s[pos + static_cast<std::size_t>(i)];
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  pos += static_cast<std::size_t>(n);
  out = v;
  return true;
}

// Fractional seconds: one or more digits, truncated to milliseconds.
bool read_fraction(std::string_view s, std::size_t& pos, std::int64_t& millis) {
  std::size_t start = pos;
  std::int64_t ms = 0;
  int digits = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    if (digits < 3) ms = ms * 10 + (s[pos] - '0');
    ++digits;
    ++pos;
  }
  if (pos == start) return false;
  for (; digits < 3; ++digits) ms *= 10;
  millis = ms;
  return true;
}

bool read_offset(std::string_view s, std::size_t& pos, std::int64_t& offset_minutes) {
  if (pos >= s.size()) return false;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
    offset_minutes = 0;
    return true;
  }
  if (s[pos] != '+' && s[pos] != '-') return false;
  int sign = s[pos] == '-' ? -1 : 1;
  ++pos;
  unsigned hh = 0, mm = 0;
  if (!read_digits(s, pos, 2, hh)) return false;
  if (pos < s.size() && s[pos] == ':') ++pos;
  if (pos < s.size()) {
    if (!read_digits(s, pos, 2, mm)) return false;
  }
  if (hh > 23 || mm > 59) return false;
  offset_minutes = sign * static_cast<std::int64_t>(hh * 60 + mm);
  return true;
}

std::optional<std::int64_t> to_millis(const Fields& f) {
  if (f.month < 1 || f.month > 12) return std::nullopt;
  if (f.day < 1 || f.day > days_in_month(f.year, f.month)) return std::nullopt;
  if (f.hour > 23 || f.minute > 59 || f.second > 60) return std::nullopt;
  std::int64_t days = days_from_civil(f.year, f.month, f.day);
  std::int64_t secs = days * 86400 + f.hour * 3600 + f.minute * 60 + f.second - f.offset_minutes * 60;
  return secs * 1000 + f.millis;
}

}  // namespace

std::optional<std::int64_t> parse_epoch_millis(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t v = 0;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || first == text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  Fields f;
  std::size_t pos = 0;
  unsigned y = 0;
  if (!read_digits(s, pos, 4, y)) return std::nullopt;
  f.year = y;
  if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_digits(s, pos, 2, f.month)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_digits(s, pos, 2, f.day)) return std::nullopt;
  if (pos == s.size()) return to_millis(f);
  if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
  ++pos;
  if (!read_digits(s, pos, 2, f.hour)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != ':') return std::nullopt;
  if (!read_digits(s, pos, 2, f.minute)) return std::nullopt;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_digits(s, pos, 2, f.second)) return std::nullopt;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      if (!read_fraction(s, pos, f.millis)) return std::nullopt;
    }
  }
  if (pos < s.size() && !read_offset(s, pos, f.offset_minutes)) return std::nullopt;
  if (pos != s.size()) return std::nullopt;
  return to_millis(f);
}

std::optional<std::int64_t> parse_with_pattern(std::string_view s, std::string_view pattern) {
  Fields f;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char pc = pattern[i];
    if (pc != '%') {
      if (pos >= s.size() || s[pos] != pc) return std::nullopt;
      ++pos;
      continue;
    }
    if (++i >= pattern.size()) return std::nullopt;
    unsigned v = 0;
    switch (pattern[i]) {
      case 'Y':
        if (!read_digits(s, pos, 4, v)) return std::nullopt;
        f.year = v;
        break;
      case 'm':
        if (!read_digits(s, pos, 2, f.month)) return std::nullopt;
        break;
      case 'd':
        if (!read_digits(s, pos, 2, f.day)) return std::nullopt;
        break;
      case 'H':
        if (!read_digits(s, pos, 2, f.hour)) return std::nullopt;
        break;
      case 'M':
        if (!read_digits(s, pos, 2, f.minute)) return std::nullopt;
        break;
      case 'S':
        if (!read_digits(s, pos, 2, f.second)) return std::nullopt;
        break;
      case 'f':
        if (!read_fraction(s, pos, f.millis)) return std::nullopt;
        break;
      case 'z':
        if (!read_offset(s, pos, f.offset_minutes)) return std::nullopt;
        break;
      case '%':
        if (pos >= s.size() || s[pos] != '%') return std::nullopt;
        ++pos;
        break;
      default: return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  return to_millis(f);
}

std::string format_iso8601(std::int64_t millis) {
  std::int64_t secs = millis >= 0 ? millis / 1000 : -((-millis + 999) / 1000);
  auto ms = static_cast<unsigned>(millis - secs * 1000);
  std::int64_t days = secs >= 0 ? secs / 86400 : -((-secs + 86399) / 86400);
  auto rem = static_cast<unsigned>(secs - days * 86400);
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", y, m, d, rem / 3600, rem / 60 % 60, rem % 60, ms);
}

}  // namespace signaldb::ts
