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
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "signaldb/ast.hpp"
#include "signaldb/bound_expr.hpp"
#include "signaldb/store.hpp"

namespace signaldb::pattern {

/// A named event predicate. Its extension in a case is the set of events for
/// which the predicate is true; NULL counts as no match.
struct Behaviour {
  std::string name;
  analyzer::BoundExpr predicate;
};

/// One membership bit per (behaviour, event). Rows are indexed by behaviour
/// position, columns by event position in the evaluated event range.
struct BehaviourBitmap {
  std::size_t event_count = 0;
  std::vector<std::vector<std::uint8_t>> bits;

  bool test(std::size_t behaviour, std::size_t event) const { return bits[behaviour][event] != 0; }
};

/// The events of one case as a half-open range of bitmap positions. The
/// position order is the case's total order.
struct CaseTrace {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

/// A set of single events: a behaviour, the wildcard, a complement, or a
/// union.
struct EventClass {
  enum class Kind { Behaviour, Any, Complement, Union };
  Kind kind = Kind::Any;
  std::size_t behaviour = 0;
  std::vector<EventClass> children;

  bool contains(const BehaviourBitmap& bitmap, std::size_t event) const;
};

struct NfaState {
  enum class Kind { Consume, Split, AssertStart, AssertEnd, Match };
  Kind kind = Kind::Match;
  std::size_t event_class = 0;  // Consume only
  int out = -1;
  int out1 = -1;                // Split only
};

/// Thompson automaton over event classes. Position assertions (^, $) are
/// epsilon edges that only pass at the first/last position of the case.
class CompiledPattern {
 public:
  CompiledPattern(std::vector<NfaState> states, int start, std::vector<EventClass> classes, bool anchored_start,
                  bool anchored_end);

  const std::vector<NfaState>& states() const { return states_; }
  int start() const { return start_; }
  const std::vector<EventClass>& classes() const { return classes_; }
  bool anchored_start() const { return anchored_start_; }
  bool anchored_end() const { return anchored_end_; }

  std::string describe() const;

 private:
  std::vector<NfaState> states_;
  int start_;
  std::vector<EventClass> classes_;
  bool anchored_start_;
  bool anchored_end_;
};

/// Lowers `pattern` (literal atoms already replaced by behaviour names) and
/// builds its automaton: `a -> b` is concatenation, `a ~> b` is `a ANY* b`,
/// `NOT x` is the complement class of x, ANY is the wildcard class.
/// Throws UnknownBehaviour or InvalidNotOperand.
CompiledPattern compile(const parser::Pattern& pattern, std::span<const std::string> behaviour_names);
CompiledPattern compile(const parser::Pattern& pattern, std::span<const Behaviour> behaviours);

/// Reusable NFA simulator; keeps its scratch buffers between cases.
class Matcher {
 public:
  explicit Matcher(const CompiledPattern& compiled);

  /// True iff some window of the trace (honouring ^/$) is accepted.
  bool matches(CaseTrace trace, const BehaviourBitmap& bitmap);

 private:
  void add(std::vector<int>& list, int state, std::size_t pos, std::size_t n);

  const CompiledPattern& compiled_;
  std::vector<int> current_, next_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t generation_ = 0;
  std::vector<int> stack_;
};

bool match_case(const CompiledPattern& compiled, CaseTrace trace, const BehaviourBitmap& bitmap);

/// Reference matcher evaluating each operator's definition directly on the
/// pattern tree by enumerating start positions and derivations. Exponential
/// in the worst case; intended for short traces. Behaviour atoms are looked
/// up in `behaviour_names` to find their bitmap row.
bool brute_force_match(const parser::Pattern& pattern, CaseTrace trace, const BehaviourBitmap& bitmap,
                       std::span<const std::string> behaviour_names);

/// Evaluates every behaviour predicate over all events of `snapshot`.
BehaviourBitmap evaluate_behaviours(std::span<const Behaviour> behaviours, const store::Snapshot& snapshot);

}  // namespace signaldb::pattern
