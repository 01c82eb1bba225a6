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

#include "signaldb/pattern.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>

namespace signaldb::pattern {

using parser::Pattern;

bool EventClass::contains(const BehaviourBitmap& bitmap, std::size_t event) const {
  switch (kind) {
    case Kind::Behaviour: return bitmap.test(behaviour, event);
    case Kind::Any: return true;
    case Kind::Complement: return !children.front().contains(bitmap, event);
    case Kind::Union:
      for (const auto& c : children) {
        if (c.contains(bitmap, event)) return true;
      }
      return false;
  }
  return false;
}

CompiledPattern::CompiledPattern(std::vector<NfaState> states, int start, std::vector<EventClass> classes,
                                 bool anchored_start, bool anchored_end)
    : states_(std::move(states)),
      start_(start),
      classes_(std::move(classes)),
      anchored_start_(anchored_start),
      anchored_end_(anchored_end) {}

namespace {

std::string describe_class(const EventClass& c) {
  switch (c.kind) {
    case EventClass::Kind::Behaviour: return fmt::format("b{}", c.behaviour);
    case EventClass::Kind::Any: return "ANY";
    case EventClass::Kind::Complement: return "!" + describe_class(c.children.front());
    case EventClass::Kind::Union: {
      std::string out = "{";
      for (std::size_t i = 0; i < c.children.size(); ++i) {
        if (i) out += ",";
        out += describe_class(c.children[i]);
      }
      return out + "}";
    }
  }
  return {};
}

}  // namespace

std::string CompiledPattern::describe() const {
  std::string out = fmt::format("nfa start={} anchored_start={} anchored_end={}\n", start_, anchored_start_,
                                anchored_end_);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    switch (s.kind) {
      case NfaState::Kind::Consume:
        out += fmt::format("  {}: consume {} -> {}\n", i, describe_class(classes_[s.event_class]), s.out);
        break;
      case NfaState::Kind::Split: out += fmt::format("  {}: split -> {}, {}\n", i, s.out, s.out1); break;
      case NfaState::Kind::AssertStart: out += fmt::format("  {}: assert ^ -> {}\n", i, s.out); break;
      case NfaState::Kind::AssertEnd: out += fmt::format("  {}: assert $ -> {}\n", i, s.out); break;
      case NfaState::Kind::Match: out += fmt::format("  {}: match\n", i); break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Thompson construction

namespace {

class Builder {
 public:
  explicit Builder(std::span<const std::string> names) : names_(names) {}

  CompiledPattern build(const Pattern& root) {
    Fragment f = fragment(root);
    int match = emit({NfaState::Kind::Match, 0, -1, -1});
    patch(f.dangling, match);
    return CompiledPattern(std::move(states_), f.start, std::move(classes_), anchored_start(root),
                           anchored_end(root));
  }

 private:
  // An automaton piece with a single entry and a list of unconnected exits,
  // each identified by (state, which-edge).
  struct Fragment {
    int start;
    std::vector<std::pair<int, int>> dangling;
  };

  int emit(NfaState s) {
    states_.push_back(s);
    return static_cast<int>(states_.size() - 1);
  }

  void patch(const std::vector<std::pair<int, int>>& exits, int target) {
    for (auto [state, which] : exits) (which == 0 ? states_[state].out : states_[state].out1) = target;
  }

  std::size_t behaviour_index(const Pattern& atom) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (store::iequals(names_[i], atom.name)) return i;
    }
    throw Error(ErrorCode::UnknownBehaviour, fmt::format("unknown behaviour '{}'", atom.name), atom.span);
  }

  EventClass to_class(const Pattern& p) const {
    switch (p.kind) {
      case Pattern::Kind::Behaviour:
      case Pattern::Kind::Literal: return {EventClass::Kind::Behaviour, behaviour_index(p), {}};
      case Pattern::Kind::Any: return {EventClass::Kind::Any, 0, {}};
      case Pattern::Kind::Not: return {EventClass::Kind::Complement, 0, {to_class(p.children.front())}};
      case Pattern::Kind::Alternation: {
        EventClass u{EventClass::Kind::Union, 0, {}};
        for (const auto& c : p.children) u.children.push_back(to_class(c));
        return u;
      }
      default:
        throw Error(ErrorCode::InvalidNotOperand,
                    "NOT applies to a single event class (an atom or an alternation of atoms)", p.span);
    }
  }

  Fragment consume(EventClass c) {
    classes_.push_back(std::move(c));
    int s = emit({NfaState::Kind::Consume, classes_.size() - 1, -1, -1});
    return {s, {{s, 0}}};
  }

  Fragment concat(Fragment a, Fragment b) {
    patch(a.dangling, b.start);
    return {a.start, std::move(b.dangling)};
  }

  Fragment star(Fragment body) {
    int split = emit({NfaState::Kind::Split, 0, body.start, -1});
    patch(body.dangling, split);
    return {split, {{split, 1}}};
  }

  Fragment fragment(const Pattern& p) {
    switch (p.kind) {
      case Pattern::Kind::Behaviour:
      case Pattern::Kind::Literal:
      case Pattern::Kind::Any:
      case Pattern::Kind::Not: return consume(to_class(p));
      case Pattern::Kind::Concat:
      case Pattern::Kind::DirectFollow: return concat(fragment(p.children[0]), fragment(p.children[1]));
      case Pattern::Kind::EventualFollow: {
        Fragment left = fragment(p.children[0]);
        Fragment gap = star(consume({EventClass::Kind::Any, 0, {}}));
        Fragment right = fragment(p.children[1]);
        return concat(concat(std::move(left), std::move(gap)), std::move(right));
      }
      case Pattern::Kind::Alternation: {
        Fragment acc = fragment(p.children.back());
        for (std::size_t i = p.children.size() - 1; i-- > 0;) {
          Fragment branch = fragment(p.children[i]);
          int split = emit({NfaState::Kind::Split, 0, branch.start, acc.start});
          std::vector<std::pair<int, int>> exits = std::move(branch.dangling);
          exits.insert(exits.end(), acc.dangling.begin(), acc.dangling.end());
          acc = {split, std::move(exits)};
        }
        return acc;
      }
      case Pattern::Kind::Repetition: return star(fragment(p.children[0]));
      case Pattern::Kind::Anchored: {
        Fragment body = fragment(p.children[0]);
        if (p.anchor_start) {
          int a = emit({NfaState::Kind::AssertStart, 0, body.start, -1});
          body.start = a;
        }
        if (p.anchor_end) {
          int a = emit({NfaState::Kind::AssertEnd, 0, -1, -1});
          patch(body.dangling, a);
          body.dangling = {{a, 0}};
        }
        return body;
      }
    }
    throw Error(ErrorCode::Internal, "unhandled pattern node");
  }

  static bool anchored_start(const Pattern& p) {
    if (p.kind == Pattern::Kind::Anchored) return p.anchor_start;
    if (p.kind != Pattern::Kind::Alternation) return false;
    return std::all_of(p.children.begin(), p.children.end(), [](const Pattern& c) { return anchored_start(c); });
  }

  static bool anchored_end(const Pattern& p) {
    if (p.kind == Pattern::Kind::Anchored) return p.anchor_end;
    if (p.kind != Pattern::Kind::Alternation) return false;
    return std::all_of(p.children.begin(), p.children.end(), [](const Pattern& c) { return anchored_end(c); });
  }

  std::span<const std::string> names_;
  std::vector<NfaState> states_;
  std::vector<EventClass> classes_;
};

}  // namespace

CompiledPattern compile(const Pattern& pattern, std::span<const std::string> behaviour_names) {
  return Builder(behaviour_names).build(pattern);
}

CompiledPattern compile(const Pattern& pattern, std::span<const Behaviour> behaviours) {
  std::vector<std::string> names;
  names.reserve(behaviours.size());
  for (const auto& b : behaviours) names.push_back(b.name);
  return compile(pattern, names);
}

// ---------------------------------------------------------------------------
// NFA simulation

Matcher::Matcher(const CompiledPattern& compiled)
    : compiled_(compiled), mark_(compiled.states().size(), 0) {
  current_.reserve(compiled.states().size());
  next_.reserve(compiled.states().size());
}

void Matcher::add(std::vector<int>& list, int state, std::size_t pos, std::size_t n) {
  const auto& states = compiled_.states();
  stack_.push_back(state);
  while (!stack_.empty()) {
    int s = stack_.back();
    stack_.pop_back();
    if (s < 0 || mark_[static_cast<std::size_t>(s)] == generation_) continue;
    mark_[static_cast<std::size_t>(s)] = generation_;
    const auto& st = states[static_cast<std::size_t>(s)];
    switch (st.kind) {
      case NfaState::Kind::Split:
        stack_.push_back(st.out1);
        stack_.push_back(st.out);
        break;
      case NfaState::Kind::AssertStart:
        if (pos == 0) stack_.push_back(st.out);
        break;
      case NfaState::Kind::AssertEnd:
        if (pos == n) stack_.push_back(st.out);
        break;
      case NfaState::Kind::Consume:
      case NfaState::Kind::Match: list.push_back(s); break;
    }
  }
}

bool Matcher::matches(CaseTrace trace, const BehaviourBitmap& bitmap) {
  const auto& states = compiled_.states();
  const std::size_t n = trace.size();
  auto bump = [&] {
    if (++generation_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      generation_ = 1;
    }
  };

  bump();
  current_.clear();
  for (std::size_t pos = 0;; ++pos) {
    // Unanchored search: a new attempt may start at every position.
    if (pos == 0 || !compiled_.anchored_start()) add(current_, compiled_.start(), pos, n);
    for (int s : current_) {
      if (states[static_cast<std::size_t>(s)].kind == NfaState::Kind::Match) return true;
    }
    if (pos == n) return false;
    if (current_.empty() && compiled_.anchored_start()) return false;

    bump();
    next_.clear();
    const std::size_t event = trace.begin + pos;
    for (int s : current_) {
      const auto& st = states[static_cast<std::size_t>(s)];
      if (st.kind == NfaState::Kind::Consume && compiled_.classes()[st.event_class].contains(bitmap, event)) {
        add(next_, st.out, pos + 1, n);
      }
    }
    std::swap(current_, next_);
  }
}

bool match_case(const CompiledPattern& compiled, CaseTrace trace, const BehaviourBitmap& bitmap) {
  Matcher m(compiled);
  return m.matches(trace, bitmap);
}

// ---------------------------------------------------------------------------
// Reference matcher

namespace {

// derives(p, i, j): the events at positions [i, j) of the case form an
// instance of p, with ^ and $ checked against the whole case.
class Reference {
 public:
  Reference(CaseTrace trace, const BehaviourBitmap& bitmap, std::span<const std::string> names)
      : trace_(trace), bitmap_(bitmap), names_(names) {}

  bool any_window(const Pattern& root) {
    const std::size_t n = trace_.size();
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = i; j <= n; ++j) {
        if (derives(root, i, j)) return true;
      }
    }
    return false;
  }

 private:
  bool in_behaviour(const Pattern& atom, std::size_t pos) const {
    for (std::size_t b = 0; b < names_.size(); ++b) {
      if (store::iequals(names_[b], atom.name)) return bitmap_.test(b, trace_.begin + pos);
    }
    throw Error(ErrorCode::UnknownBehaviour, fmt::format("unknown behaviour '{}'", atom.name), atom.span);
  }

  // Single-event membership for class-shaped patterns.
  bool member(const Pattern& p, std::size_t pos) const {
    switch (p.kind) {
      case Pattern::Kind::Behaviour:
      case Pattern::Kind::Literal: return in_behaviour(p, pos);
      case Pattern::Kind::Any: return true;
      case Pattern::Kind::Not: return !member(p.children[0], pos);
      case Pattern::Kind::Alternation:
        return std::any_of(p.children.begin(), p.children.end(),
                           [&](const Pattern& c) { return member(c, pos); });
      default:
        throw Error(ErrorCode::InvalidNotOperand, "NOT applies to a single event class", p.span);
    }
  }

  bool derives(const Pattern& p, std::size_t i, std::size_t j) {
    auto key = std::make_tuple(&p, i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = compute(p, i, j);
    memo_[key] = r;
    return r;
  }

  bool compute(const Pattern& p, std::size_t i, std::size_t j) {
    const std::size_t n = trace_.size();
    switch (p.kind) {
      case Pattern::Kind::Behaviour:
      case Pattern::Kind::Literal:
      case Pattern::Kind::Any:
        // One event that matches the behaviour (ANY: any event at all).
        return j == i + 1 && member(p, i);
      case Pattern::Kind::Not:
        // One event c that is not in the operand's class.
        return j == i + 1 && !member(p.children[0], i);
      case Pattern::Kind::Concat:
      case Pattern::Kind::DirectFollow:
        // a -> b: the last event of a is immediately followed by the first
        // event of b, nothing in between.
        for (std::size_t m = i; m <= j; ++m) {
          if (derives(p.children[0], i, m) && derives(p.children[1], m, j)) return true;
        }
        return false;
      case Pattern::Kind::EventualFollow:
        // a ~> b: b occurs somewhere after a; the events in between are
        // unconstrained.
        for (std::size_t m = i; m <= j; ++m) {
          if (!derives(p.children[0], i, m)) continue;
          for (std::size_t k = m; k <= j; ++k) {
            if (derives(p.children[1], k, j)) return true;
          }
        }
        return false;
      case Pattern::Kind::Alternation:
        return std::any_of(p.children.begin(), p.children.end(),
                           [&](const Pattern& c) { return derives(c, i, j); });
      case Pattern::Kind::Repetition:
        // Zero occurrences, or one non-empty occurrence followed by more.
        if (i == j) return true;
        for (std::size_t m = i + 1; m <= j; ++m) {
          if (derives(p.children[0], i, m) && derives(p, m, j)) return true;
        }
        return false;
      case Pattern::Kind::Anchored:
        // ^: the window starts at the first event; $: it ends at the last.
        if (p.anchor_start && i != 0) return false;
        if (p.anchor_end && j != n) return false;
        return derives(p.children[0], i, j);
    }
    return false;
  }

  CaseTrace trace_;
  const BehaviourBitmap& bitmap_;
  std::span<const std::string> names_;
  std::map<std::tuple<const Pattern*, std::size_t, std::size_t>, bool> memo_;
};

}  // namespace

bool brute_force_match(const Pattern& pattern, CaseTrace trace, const BehaviourBitmap& bitmap,
                       std::span<const std::string> behaviour_names) {
  return Reference(trace, bitmap, behaviour_names).any_window(pattern);
}

}  // namespace signaldb::pattern
