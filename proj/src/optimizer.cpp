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

#include <algorithm>
#include <set>

#include "signaldb/executor.hpp"

namespace signaldb::exec {

using namespace analyzer;

namespace {

template <typename F>
void for_each_expr(const LogicalPlan& plan, F&& f) {
  auto agg = [&](const AggCall& a) {
    if (a.arg) f(*a.arg);
  };
  for (const auto& op : plan.ops) {
    if (const auto* sub = std::get_if<EventSubqueryOp>(&op)) {
      for (const auto& sq : sub->subqueries) {
        for (const auto& a : sq.aggs) agg(a);
        if (sq.filter) f(*sq.filter);
        f(sq.result);
      }
    } else if (const auto* pf = std::get_if<PatternFilterOp>(&op)) {
      for (const auto& b : pf->spec.behaviours) f(b.predicate);
    } else if (const auto* fl = std::get_if<FilterOp>(&op)) {
      f(fl->predicate);
    } else if (const auto* ag = std::get_if<AggregateOp>(&op)) {
      for (const auto& k : ag->keys) f(k);
      for (const auto& a : ag->aggs) agg(a);
    } else if (const auto* so = std::get_if<SortOp>(&op)) {
      for (const auto& k : so->keys) f(k.expr);
    } else if (const auto* pr = std::get_if<ProjectOp>(&op)) {
      for (const auto& e : pr->exprs) f(e);
    }
  }
}

bool references_slots(const BoundExpr& e) {
  bool found = false;
  visit(e, [&](const BoundExpr& x) { found = found || x.kind == BoundExpr::Kind::Slot; });
  return found;
}

void split_and(const BoundExpr& e, std::vector<BoundExpr>& out) {
  if (e.kind == BoundExpr::Kind::Binary && e.op == BoundOp::And) {
    split_and(e.args[0], out);
    split_and(e.args[1], out);
  } else {
    out.push_back(e);
  }
}

BoundExpr and_all(std::vector<BoundExpr> parts) {
  BoundExpr acc = std::move(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) {
    BoundExpr b;
    b.kind = BoundExpr::Kind::Binary;
    b.op = BoundOp::And;
    b.type = ScalarType::Boolean;
    b.level = Level::Case;
    b.args.push_back(std::move(acc));
    b.args.push_back(std::move(parts[i]));
    acc = std::move(b);
  }
  return acc;
}

// Case-level conjuncts that do not read derived slots run right after the
// scan, so pattern matching and event subqueries see fewer cases.
void push_down_filters(LogicalPlan& plan) {
  if (plan.flattened) return;
  auto it = std::find_if(plan.ops.begin(), plan.ops.end(),
                         [](const PlanOp& op) { return std::holds_alternative<FilterOp>(op); });
  if (it == plan.ops.end()) return;
  const auto filter_pos = static_cast<std::size_t>(it - plan.ops.begin());
  bool expensive_below = false;
  for (std::size_t i = 1; i < filter_pos; ++i) {
    const auto& op = plan.ops[i];
    if (std::holds_alternative<PatternFilterOp>(op) || std::holds_alternative<EventSubqueryOp>(op)) {
      expensive_below = true;
    }
  }
  if (!expensive_below) return;

  std::vector<BoundExpr> parts, movable, rest;
  split_and(std::get<FilterOp>(*it).predicate, parts);
  for (auto& p : parts) (references_slots(p) ? rest : movable).push_back(std::move(p));
  if (movable.empty()) return;
  if (rest.empty()) plan.ops.erase(it);
  else std::get<FilterOp>(*it).predicate = and_all(std::move(rest));
  plan.ops.insert(plan.ops.begin() + 1, FilterOp{and_all(std::move(movable))});
}

// Without a filter, FIRST/LAST are the values at the case boundaries.
void positional_first_last(LogicalPlan& plan) {
  for (auto& op : plan.ops) {
    auto* sub = std::get_if<EventSubqueryOp>(&op);
    if (!sub) continue;
    for (auto& sq : sub->subqueries) {
      if (sq.filter) continue;
      for (auto& a : sq.aggs) {
        if (a.kind == AggKind::First || a.kind == AggKind::Last) a.positional = true;
      }
    }
  }
}

bool preserves_cases(const PlanOp& op) {
  if (std::holds_alternative<EventSubqueryOp>(op) || std::holds_alternative<ProjectOp>(op)) return true;
  if (const auto* pf = std::get_if<PatternFilterOp>(&op)) return pf->spec.mark_slot.has_value();
  return false;
}

// LIMIT sinks through operators that map cases one-to-one, ending in the
// scan when nothing below it drops or reorders cases.
void push_down_limit(LogicalPlan& plan) {
  auto it = std::find_if(plan.ops.begin(), plan.ops.end(),
                         [](const PlanOp& op) { return std::holds_alternative<LimitOp>(op); });
  if (it == plan.ops.end()) return;
  auto pos = static_cast<std::size_t>(it - plan.ops.begin());
  while (pos > 1 && preserves_cases(plan.ops[pos - 1])) {
    std::swap(plan.ops[pos - 1], plan.ops[pos]);
    --pos;
  }
  if (pos == 1 && !plan.flattened) {
    auto& scan = std::get<ScanOp>(plan.ops[0]);
    const auto n = std::get<LimitOp>(plan.ops[1]).count;
    scan.limit = scan.limit ? std::min(*scan.limit, n) : n;
    plan.ops.erase(plan.ops.begin() + 1);
  }
}

}  // namespace

std::vector<store::ColumnId> required_columns(const LogicalPlan& plan) {
  const auto& scan = std::get<ScanOp>(plan.ops.front());
  if (scan.columns) return *scan.columns;
  std::vector<store::ColumnId> all;
  for (Level level : {Level::Case, Level::Event}) {
    for (std::size_t i = 0; i < plan.schema.attributes(level).size(); ++i) all.push_back({level, i});
  }
  return all;
}

LogicalPlan optimize(LogicalPlan plan) {
  push_down_filters(plan);
  positional_first_last(plan);
  push_down_limit(plan);

  std::set<store::ColumnId> used;
  for_each_expr(plan, [&](const BoundExpr& e) {
    visit(e, [&](const BoundExpr& x) {
      if (x.kind == BoundExpr::Kind::Column) used.insert(x.column);
    });
  });
  std::get<ScanOp>(plan.ops.front()).columns = std::vector<store::ColumnId>(used.begin(), used.end());
  return plan;
}

}  // namespace signaldb::exec
