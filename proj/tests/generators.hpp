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
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "signaldb/ast.hpp"
#include "signaldb/pattern.hpp"
#include "signaldb/store.hpp"

namespace signaldb::testing {

using Rng = std::mt19937_64;

// A single trace with membership bits for behaviours named a, b, c.
struct RandomTrace {
  pattern::BehaviourBitmap bitmap;
  pattern::CaseTrace trace;
};

inline const std::vector<std::string>& abc() {
  static const std::vector<std::string> names{"a", "b", "c"};
  return names;
}

inline pattern::BehaviourBitmap empty_bitmap(std::size_t behaviours, std::size_t events) {
  pattern::BehaviourBitmap bm;
  bm.event_count = events;
  bm.bits.assign(behaviours, std::vector<std::uint8_t>(events, 0));
  return bm;
}

// Each event belongs to each behaviour independently, so behaviours overlap.
inline RandomTrace random_overlapping_trace(Rng& rng, std::size_t max_len) {
  std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  RandomTrace t{empty_bitmap(3, n), {0, n}};
  std::bernoulli_distribution bit(0.4);
  for (auto& row : t.bitmap.bits) {
    for (auto& b : row) b = bit(rng);
  }
  return t;
}

// Each event carries exactly one label from {a, b, c}.
inline RandomTrace random_labelled_trace(Rng& rng, std::size_t max_len, std::vector<int>* labels = nullptr) {
  std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  RandomTrace t{empty_bitmap(3, n), {0, n}};
  std::uniform_int_distribution<int> label(0, 2);
  if (labels) labels->clear();
  for (std::size_t e = 0; e < n; ++e) {
    int l = label(rng);
    t.bitmap.bits[l][e] = 1;
    if (labels) labels->push_back(l);
  }
  return t;
}

// Trace from letters: a, b, c belong to that behaviour; any other letter to
// none. Spaces are ignored.
inline RandomTrace trace_of(std::string_view letters) {
  std::string ev;
  for (char ch : letters) {
    if (ch != ' ') ev.push_back(ch);
  }
  RandomTrace t{empty_bitmap(3, ev.size()), {0, ev.size()}};
  for (std::size_t e = 0; e < ev.size(); ++e) {
    if (ev[e] >= 'a' && ev[e] <= 'c') t.bitmap.bits[ev[e] - 'a'][e] = 1;
  }
  return t;
}

// The eight operator rows of the matching-examples table, each with a trace
// that matches and a minimally changed trace that does not.
struct OperatorExample {
  const char* pattern;
  const char* matching;
  const char* perturbed;
};

inline const std::vector<OperatorExample>& operator_examples() {
  static const std::vector<OperatorExample> rows{
      {"a -> b", "x a b x", "x a c b x"},
      {"a ~> b", "x a c c b", "x b c c a"},
      {"^ a", "a x b", "x a b"},
      {"a $", "b x a", "b a x"},
      {"a ANY b", "x a c b", "x a b"},
      {"a NOT b", "x a c", "x a b"},
      {"^ (a | b)", "b c a", "c a b"},
      {"a ANY* b", "a c c b", "b c c a"},
  };
  return rows;
}

inline parser::Pattern random_atom(Rng& rng) {
  return parser::Pattern::behaviour(abc()[std::uniform_int_distribution<std::size_t>(0, 2)(rng)]);
}

// A single-event class: atom, ANY, NOT of a class, or an alternation of
// classes.
inline parser::Pattern random_class(Rng& rng, int depth) {
  int pick = std::uniform_int_distribution<int>(0, depth > 0 ? 3 : 1)(rng);
  switch (pick) {
    case 0: return random_atom(rng);
    case 1: return parser::Pattern::any();
    case 2: return parser::Pattern::negate(random_class(rng, depth - 1));
    default: return parser::Pattern::alternation({random_class(rng, depth - 1), random_class(rng, depth - 1)});
  }
}

// Any pattern without anchors, using every operator.
inline parser::Pattern random_body(Rng& rng, int depth) {
  using K = parser::Pattern::Kind;
  if (depth <= 0) {
    return std::bernoulli_distribution(0.8)(rng) ? random_atom(rng) : parser::Pattern::any();
  }
  switch (std::uniform_int_distribution<int>(0, 7)(rng)) {
    case 0: return random_atom(rng);
    case 1: return parser::Pattern::any();
    case 2: return parser::Pattern::negate(random_class(rng, depth - 1));
    case 3: return parser::Pattern::binary(K::Concat, random_body(rng, depth - 1), random_body(rng, depth - 1));
    case 4: return parser::Pattern::binary(K::DirectFollow, random_body(rng, depth - 1), random_body(rng, depth - 1));
    case 5:
      return parser::Pattern::binary(K::EventualFollow, random_body(rng, depth - 1), random_body(rng, depth - 1));
    case 6: return parser::Pattern::alternation({random_body(rng, depth - 1), random_body(rng, depth - 1)});
    default: return parser::Pattern::star(random_body(rng, depth - 1));
  }
}

inline parser::Pattern maybe_anchor(Rng& rng, parser::Pattern p) {
  std::uniform_int_distribution<int> d(0, 3);
  int a = d(rng);
  if (a == 0) return p;
  return parser::Pattern::anchored(std::move(p), (a & 1) != 0, (a & 2) != 0);
}

// Depth counts the body; anchors wrap the root or a root alternative.
inline parser::Pattern random_pattern(Rng& rng, int max_depth) {
  int depth = std::uniform_int_distribution<int>(1, max_depth)(rng);
  if (std::bernoulli_distribution(0.2)(rng)) {
    return parser::Pattern::alternation(
        {maybe_anchor(rng, random_body(rng, depth - 1)), maybe_anchor(rng, random_body(rng, depth - 1))});
  }
  return maybe_anchor(rng, random_body(rng, depth));
}

// A random log with typed case and event attributes, including NULLs.
// Case-level columns are constant within each case.
inline store::EventLogPtr random_log(Rng& rng, const std::string& log_id) {
  using store::ValueMap;
  auto schema = store::Schema::with_required(
      {{"region", ScalarType::String}, {"priority", ScalarType::Number}, {"vip", ScalarType::Boolean}},
      {{"cost", ScalarType::Number}, {"wait", ScalarType::Duration}, {"note", ScalarType::String},
       {"due", ScalarType::Timestamp}},
      true);
  auto log = std::make_shared<store::EventLog>(log_id, schema);
  std::uniform_int_distribution<int> n_cases(1, 12), n_events(1, 6), small(0, 4);
  std::bernoulli_distribution null(0.15);
  const char* texts[] = {"north", "south", "a,b", "say \"hi\"", "line\nbreak", "", " padded "};
  auto text = [&] { return std::string(texts[std::uniform_int_distribution<int>(0, 6)(rng)]); };
  int cases = n_cases(rng);
  for (int c = 0; c < cases; ++c) {
    ValueMap cv{{"case_id", Value::string("c" + std::to_string(c))},
                {"region", null(rng) ? Value::null(ScalarType::String) : Value::string(text())},
                {"priority", null(rng) ? Value::null(ScalarType::Number) : Value::number(small(rng) * 1.25 - 2)},
                {"vip", null(rng) ? Value::null(ScalarType::Boolean) : Value::boolean(small(rng) % 2 == 0)}};
    std::vector<ValueMap> events;
    int n = n_events(rng);
    for (int e = 0; e < n; ++e) {
      std::int64_t t = 1'600'000'000'000 + std::uniform_int_distribution<std::int64_t>(0, 5'000'000)(rng);
      events.push_back(
          {{"event_name", Value::string("step" + std::to_string(small(rng)))},
           {"end_time", Value::timestamp(t)},
           {"start_time", null(rng) ? Value::null(ScalarType::Timestamp) : Value::timestamp(t - small(rng) * 1000)},
           {"cost", null(rng) ? Value::null(ScalarType::Number) : Value::number(small(rng) * 0.1 + 1e-3)},
           {"wait", null(rng) ? Value::null(ScalarType::Duration) : Value::duration(small(rng) * 60'000 - 1)},
           {"note", null(rng) ? Value::null(ScalarType::String) : Value::string(text())},
           {"due", null(rng) ? Value::null(ScalarType::Timestamp) : Value::timestamp(t + 86'400'000)}});
    }
    log->append_case(cv, events);
  }
  return log;
}

// Support-desk-shaped log: every case opens, is assigned and closes; some
// are reopened after being closed while blocked.
inline store::EventLogPtr synthetic_support_log(std::size_t cases, std::size_t events_per_case,
                                                const std::string& log_id, std::uint64_t seed = 7) {
  auto log = std::make_shared<store::EventLog>(
      log_id, store::Schema::with_required({{"customer_id", ScalarType::String}, {"final_status", ScalarType::String}},
                                           {{"status", ScalarType::String}}));
  Rng rng(seed);
  std::uniform_int_distribution<std::int64_t> gap(1000, 86'400'000);
  std::bernoulli_distribution blocked(0.3);
  const char* names[] = {"Open ticket", "Assign ticket", "Work on ticket", "Close ticket"};
  std::vector<store::ValueMap> events(events_per_case);
  for (std::size_t c = 0; c < cases; ++c) {
    std::int64_t t = 1'675'000'000'000 + static_cast<std::int64_t>(c) * 1000;
    bool is_blocked = blocked(rng);
    for (std::size_t e = 0; e < events_per_case; ++e) {
      const char* name = e == 0 ? names[0] : e == 1 ? names[1] : e + 2 == events_per_case ? names[3] : names[2];
      if (e + 1 == events_per_case) name = is_blocked ? names[0] : names[3];
      t += gap(rng);
      events[e] = {{"event_name", Value::string(name)},
                   {"end_time", Value::timestamp(t)},
                   {"status", Value::string(is_blocked && e + 2 >= events_per_case ? "blocked" : "open")}};
    }
    log->append_case({{"case_id", Value::string(std::to_string(100000 + c))},
                      {"customer_id", Value::string("C" + std::to_string(c % 997))},
                      {"final_status", Value::string(is_blocked ? "blocked" : "done")}},
                     events);
  }
  return log;
}

}  // namespace signaldb::testing
