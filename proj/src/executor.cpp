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

#include "signaldb/executor.hpp"

#include <future>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace signaldb::exec {

using analyzer::AggCall;
using analyzer::AggKind;
using analyzer::BoundExpr;
using analyzer::LogicalPlan;
using store::Level;

void Frame::select(const std::vector<std::uint32_t>& keep) {
  for (auto& s : slots) {
    if (s.size() == rows && rows > 0) s = s.take(keep);
  }
  if (!case_idx.empty()) {
    std::vector<std::uint32_t> c(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) c[i] = case_idx[keep[i]];
    case_idx = std::move(c);
  }
  if (!event_idx.empty()) {
    std::vector<std::uint32_t> e(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) e[i] = event_idx[keep[i]];
    event_idx = std::move(e);
  }
  rows = keep.size();
}

struct ExecState {
  const store::Snapshot& snapshot;
  const ExecOptions& options;
  Frame frame;
  std::optional<pattern::BehaviourBitmap> bitmap;
  std::optional<ResultTable> result;
  std::size_t cells = 0;

  void charge(std::size_t n) {
    cells += n;
    if (cells > options.max_cells) {
      throw Error(ErrorCode::ResourceLimitExceeded,
                  fmt::format("query exceeds the budget of {} materialized cells", options.max_cells));
    }
  }

  Vec eval(const BoundExpr& e) {
    charge(frame.rows);
    return evaluate(e, snapshot, frame.rows, frame.case_idx, frame.event_idx, &frame.slots);
  }
};

namespace {

std::string column_name(const store::Schema& schema, store::ColumnId id) {
  return fmt::format("{}.{}", id.level == Level::Case ? "case" : "event",
                     schema.attributes(id.level)[id.index].name);
}

// Event rows of the given cases, in stored order, with the frame row each
// event belongs to.
struct EventRows {
  std::vector<std::uint32_t> event_idx;
  std::vector<std::uint32_t> case_idx;
  std::vector<std::uint32_t> row_of_event;
};

EventRows event_rows(const store::Snapshot& snap, std::span<const std::uint32_t> cases) {
  EventRows out;
  std::size_t total = 0;
  for (auto c : cases) total += snap.case_end(c) - snap.case_begin(c);
  out.event_idx.reserve(total);
  out.case_idx.reserve(total);
  out.row_of_event.reserve(total);
  for (std::size_t r = 0; r < cases.size(); ++r) {
    for (auto e = snap.case_begin(cases[r]); e < snap.case_end(cases[r]); ++e) {
      out.event_idx.push_back(static_cast<std::uint32_t>(e));
      out.case_idx.push_back(cases[r]);
      out.row_of_event.push_back(static_cast<std::uint32_t>(r));
    }
  }
  return out;
}

std::string expr_text(const BoundExpr& e, const store::Schema& s) { return analyzer::describe(e, s); }

class ColumnScanExec : public PhysicalOp {
 public:
  ColumnScanExec(std::string columns, std::optional<std::int64_t> limit)
      : columns_(std::move(columns)), limit_(limit) {}
  std::string name() const override { return "ColumnScan"; }
  std::string describe() const override {
    std::string out = fmt::format("ColumnScan(columns={}", columns_);
    if (limit_) out += fmt::format(", limit={}", *limit_);
    return out + ")";
  }
  void run(ExecState& st) const override {
    std::size_t n = st.snapshot.case_count();
    if (limit_) n = std::min<std::size_t>(n, static_cast<std::size_t>(std::max<std::int64_t>(0, *limit_)));
    st.charge(n);
    st.frame.rows = n;
    st.frame.case_idx.resize(n);
    std::iota(st.frame.case_idx.begin(), st.frame.case_idx.end(), 0u);
  }

 private:
  std::string columns_;
  std::optional<std::int64_t> limit_;
};

class FlattenExec : public PhysicalOp {
 public:
  std::string name() const override { return "FlattenExec"; }
  void run(ExecState& st) const override {
    EventRows ev = event_rows(st.snapshot, st.frame.case_idx);
    st.charge(ev.event_idx.size());
    st.frame.rows = ev.event_idx.size();
    st.frame.event_idx = std::move(ev.event_idx);
    st.frame.case_idx = std::move(ev.case_idx);
  }
};

class EventAggregateExec : public PhysicalOp {
 public:
  EventAggregateExec(std::vector<analyzer::EventSubquery> subqueries, std::string text)
      : subqueries_(std::move(subqueries)), text_(std::move(text)) {}
  std::string name() const override { return "EventAggregateExec"; }
  std::string describe() const override { return "EventAggregateExec(" + text_ + ")"; }

  void run(ExecState& st) const override {
    const auto& snap = st.snapshot;
    const auto& frame = st.frame;
    std::optional<EventRows> events;
    for (const auto& sq : subqueries_) {
      std::vector<Vec> values;
      std::optional<std::vector<std::uint8_t>> mask;
      for (const auto& agg : sq.aggs) {
        if (agg.positional) {
          values.push_back(positional(st, agg));
          continue;
        }
        if (!events) {
          events = event_rows(snap, frame.case_idx);
          st.charge(events->event_idx.size());
        }
        const std::size_t n = events->event_idx.size();
        if (sq.filter && !mask) {
          Vec f = evaluate(*sq.filter, snap, n, events->case_idx, events->event_idx);
          st.charge(n);
          mask.emplace(n);
          for (std::size_t i = 0; i < n; ++i) (*mask)[i] = f.valid[i] && f.ints[i];
        }
        std::optional<Vec> arg;
        if (agg.arg) {
          arg = evaluate(*agg.arg, snap, n, events->case_idx, events->event_idx);
          st.charge(n);
        }
        values.push_back(accumulate(agg, arg ? &*arg : nullptr, events->row_of_event, frame.rows,
                                    mask ? &*mask : nullptr));
      }
      st.charge(frame.rows);
      st.frame.slots[sq.slot] =
          evaluate(sq.result, snap, frame.rows, frame.case_idx, {}, &st.frame.slots, &values);
    }
  }

 private:
  // FIRST/LAST read the boundary event of each case straight from the offsets.
  static Vec positional(ExecState& st, const AggCall& agg) {
    const bool last = agg.kind == AggKind::Last;
    const auto& snap = st.snapshot;
    const auto& cases = st.frame.case_idx;
    st.charge(cases.size());
    if (agg.arg->kind == BoundExpr::Kind::Column && agg.arg->column.level == Level::Event) {
      return first_last_positional(snap.column(agg.arg->column), snap.offsets(), cases, last);
    }
    std::vector<std::uint32_t> boundary(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
      boundary[i] = static_cast<std::uint32_t>(last ? snap.case_end(cases[i]) - 1 : snap.case_begin(cases[i]));
    }
    return evaluate(*agg.arg, snap, cases.size(), cases, boundary);
  }

  std::vector<analyzer::EventSubquery> subqueries_;
  std::string text_;
};

class BehaviourEvalExec : public PhysicalOp {
 public:
  BehaviourEvalExec(std::vector<pattern::Behaviour> behaviours, std::string text)
      : behaviours_(std::move(behaviours)), text_(std::move(text)) {}
  std::string name() const override { return "BehaviourEval"; }
  std::string describe() const override { return "BehaviourEval(" + text_ + ")"; }
  void run(ExecState& st) const override {
    st.charge(st.snapshot.event_count() * behaviours_.size());
    st.bitmap = evaluate_behaviours(behaviours_, st.snapshot, &st.frame.case_idx);
  }

 private:
  std::vector<pattern::Behaviour> behaviours_;
  std::string text_;
};

class PatternFilterExec : public PhysicalOp {
 public:
  PatternFilterExec(std::shared_ptr<const pattern::CompiledPattern> compiled, std::optional<std::size_t> mark,
                    std::string text)
      : compiled_(std::move(compiled)), mark_(mark), text_(std::move(text)) {}
  std::string name() const override { return "PatternFilterExec"; }
  std::string describe() const override { return "PatternFilterExec(" + text_ + ")"; }
  void run(ExecState& st) const override {
    auto hits = match_cases(*compiled_, st.snapshot, *st.bitmap, st.frame.case_idx, st.options.workers);
    st.bitmap.reset();
    if (mark_) {
      st.charge(hits.size());
      Vec v(ScalarType::Boolean, hits.size());
      for (std::size_t i = 0; i < hits.size(); ++i) v.ints[i] = hits[i];
      st.frame.slots[*mark_] = std::move(v);
      return;
    }
    std::vector<std::uint32_t> keep;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i]) keep.push_back(static_cast<std::uint32_t>(i));
    }
    st.frame.select(keep);
  }

 private:
  std::shared_ptr<const pattern::CompiledPattern> compiled_;
  std::optional<std::size_t> mark_;
  std::string text_;
};

class VectorFilterExec : public PhysicalOp {
 public:
  VectorFilterExec(BoundExpr predicate, std::string text) : predicate_(std::move(predicate)), text_(std::move(text)) {}
  std::string name() const override { return "VectorFilter"; }
  std::string describe() const override { return "VectorFilter(" + text_ + ")"; }
  void run(ExecState& st) const override { st.frame.select(vector_filter(st.eval(predicate_))); }

 private:
  BoundExpr predicate_;
  std::string text_;
};

class HashAggregateExec : public PhysicalOp {
 public:
  HashAggregateExec(std::vector<BoundExpr> keys, std::vector<AggCall> aggs, std::string text)
      : keys_(std::move(keys)), aggs_(std::move(aggs)), text_(std::move(text)) {}
  std::string name() const override { return "HashAggregate"; }
  std::string describe() const override { return "HashAggregate(" + text_ + ")"; }
  void run(ExecState& st) const override {
    std::vector<Vec> keys;
    for (const auto& k : keys_) keys.push_back(st.eval(k));
    std::vector<const Vec*> key_ptrs;
    for (const auto& k : keys) key_ptrs.push_back(&k);
    Groups groups = hash_group(key_ptrs, st.frame.rows);
    if (!keys_.empty() && st.frame.rows == 0) groups.first_row.clear();

    std::vector<Vec> out;
    for (const auto& k : keys) out.push_back(k.take(groups.first_row));
    for (const auto& agg : aggs_) {
      std::optional<Vec> arg;
      if (agg.arg) arg = st.eval(*agg.arg);
      out.push_back(accumulate(agg, arg ? &*arg : nullptr, groups.group_of_row, groups.count()));
    }
    st.charge(groups.count() * out.size());
    st.frame = Frame{};
    st.frame.rows = groups.count();
    st.frame.slots = std::move(out);
  }

 private:
  std::vector<BoundExpr> keys_;
  std::vector<AggCall> aggs_;
  std::string text_;
};

class SortExec : public PhysicalOp {
 public:
  SortExec(std::vector<analyzer::SortKey> keys, std::string text) : keys_(std::move(keys)), text_(std::move(text)) {}
  std::string name() const override { return "SortExec"; }
  std::string describe() const override { return "SortExec(" + text_ + ")"; }
  void run(ExecState& st) const override {
    std::vector<Vec> keys;
    std::vector<bool> desc;
    for (const auto& k : keys_) {
      keys.push_back(st.eval(k.expr));
      desc.push_back(k.descending);
    }
    std::vector<const Vec*> ptrs;
    for (const auto& k : keys) ptrs.push_back(&k);
    st.frame.select(sort_rows(ptrs, desc, st.frame.rows));
  }

 private:
  std::vector<analyzer::SortKey> keys_;
  std::string text_;
};

class ProjectExec : public PhysicalOp {
 public:
  ProjectExec(std::vector<BoundExpr> exprs, std::vector<std::string> names, std::string text)
      : exprs_(std::move(exprs)), names_(std::move(names)), text_(std::move(text)) {}
  std::string name() const override { return "ProjectExec"; }
  std::string describe() const override { return "ProjectExec(" + text_ + ")"; }
  void run(ExecState& st) const override {
    ResultTable table;
    table.rows_without_columns = st.frame.rows;
    for (std::size_t i = 0; i < exprs_.size(); ++i) {
      Vec v = st.eval(exprs_[i]);
      ResultColumn col{names_[i], exprs_[i].type, {}};
      col.cells.reserve(v.size());
      for (std::size_t r = 0; r < v.size(); ++r) col.cells.push_back(v.get(r));
      table.columns.push_back(std::move(col));
    }
    st.result = std::move(table);
  }

 private:
  std::vector<BoundExpr> exprs_;
  std::vector<std::string> names_;
  std::string text_;
};

class LimitExec : public PhysicalOp {
 public:
  explicit LimitExec(std::int64_t n) : n_(std::max<std::int64_t>(0, n)) {}
  std::string name() const override { return "LimitExec"; }
  std::string describe() const override { return fmt::format("LimitExec({})", n_); }
  void run(ExecState& st) const override {
    const auto n = static_cast<std::size_t>(n_);
    if (st.result) {
      for (auto& c : st.result->columns) {
        if (c.cells.size() > n) c.cells.resize(n);
      }
      st.result->rows_without_columns = std::min(st.result->rows_without_columns, n);
      return;
    }
    std::vector<std::uint32_t> rows(st.frame.rows);
    std::iota(rows.begin(), rows.end(), 0u);
    st.frame.select(limit(std::move(rows), n_));
  }

 private:
  std::int64_t n_;
};

}  // namespace

// ---------------------------------------------------------------------------

PhysicalPlan::PhysicalPlan(std::shared_ptr<const store::Snapshot> snapshot, std::vector<std::unique_ptr<PhysicalOp>> ops,
                           std::vector<analyzer::OutputColumn> output, std::size_t frame_slots, ExecOptions options)
    : snapshot_(std::move(snapshot)),
      ops_(std::move(ops)),
      output_(std::move(output)),
      frame_slots_(frame_slots),
      options_(options) {}

std::vector<std::string> PhysicalPlan::op_names() const {
  std::vector<std::string> names;
  for (const auto& op : ops_) names.push_back(op->name());
  return names;
}

std::string PhysicalPlan::describe() const {
  std::string out;
  for (const auto& op : ops_) out += op->describe() + "\n";
  return out;
}

std::shared_ptr<PhysicalPlan> build_physical(const LogicalPlan& plan, std::shared_ptr<const store::Snapshot> snapshot,
                                             ExecOptions options) {
  if (!snapshot) throw Error(ErrorCode::Internal, "no snapshot");
  const auto& schema = plan.schema;
  for (const auto& id : required_columns(plan)) (void)snapshot->column(id);

  auto ex = [&](const BoundExpr& e) { return expr_text(e, schema); };
  std::vector<std::unique_ptr<PhysicalOp>> ops;
  for (const auto& op : plan.ops) {
    if (const auto* scan = std::get_if<analyzer::ScanOp>(&op)) {
      std::string cols = "*";
      if (scan->columns) {
        cols = "[";
        for (std::size_t i = 0; i < scan->columns->size(); ++i) {
          if (i) cols += ", ";
          cols += column_name(schema, (*scan->columns)[i]);
        }
        cols += "]";
      }
      ops.push_back(std::make_unique<ColumnScanExec>(cols, scan->limit));
    } else if (std::holds_alternative<analyzer::FlattenOp>(op)) {
      ops.push_back(std::make_unique<FlattenExec>());
    } else if (const auto* sub = std::get_if<analyzer::EventSubqueryOp>(&op)) {
      std::string text;
      for (const auto& sq : sub->subqueries) {
        if (!text.empty()) text += "; ";
        text += fmt::format("#{} = {} with [", sq.slot, ex(sq.result));
        for (std::size_t i = 0; i < sq.aggs.size(); ++i) {
          if (i) text += ", ";
          text += analyzer::describe(sq.aggs[i], schema);
        }
        text += "]";
        if (sq.filter) text += " where " + ex(*sq.filter);
      }
      ops.push_back(std::make_unique<EventAggregateExec>(sub->subqueries, text));
    } else if (const auto* pf = std::get_if<analyzer::PatternFilterOp>(&op)) {
      std::string behaviours;
      for (const auto& b : pf->spec.behaviours) {
        if (!behaviours.empty()) behaviours += ", ";
        behaviours += fmt::format("{}: {}", b.name, ex(b.predicate));
      }
      ops.push_back(std::make_unique<BehaviourEvalExec>(pf->spec.behaviours, behaviours));
      std::string text = parser::print(pf->spec.pattern);
      if (pf->spec.mark_slot) text += fmt::format(", mark=#{}", *pf->spec.mark_slot);
      ops.push_back(std::make_unique<PatternFilterExec>(pf->spec.compiled, pf->spec.mark_slot, text));
    } else if (const auto* f = std::get_if<analyzer::FilterOp>(&op)) {
      ops.push_back(std::make_unique<VectorFilterExec>(f->predicate, ex(f->predicate)));
    } else if (const auto* agg = std::get_if<analyzer::AggregateOp>(&op)) {
      std::string text = "keys=[";
      for (std::size_t i = 0; i < agg->keys.size(); ++i) text += (i ? ", " : "") + ex(agg->keys[i]);
      text += "], aggs=[";
      for (std::size_t i = 0; i < agg->aggs.size(); ++i) {
        text += (i ? ", " : "") + analyzer::describe(agg->aggs[i], schema);
      }
      text += "]";
      ops.push_back(std::make_unique<HashAggregateExec>(agg->keys, agg->aggs, text));
    } else if (const auto* sort = std::get_if<analyzer::SortOp>(&op)) {
      std::string text;
      for (std::size_t i = 0; i < sort->keys.size(); ++i) {
        text += (i ? ", " : "") + ex(sort->keys[i].expr) + (sort->keys[i].descending ? " DESC" : " ASC");
      }
      ops.push_back(std::make_unique<SortExec>(sort->keys, text));
    } else if (const auto* lim = std::get_if<analyzer::LimitOp>(&op)) {
      ops.push_back(std::make_unique<LimitExec>(lim->count));
    } else if (const auto* proj = std::get_if<analyzer::ProjectOp>(&op)) {
      std::string text;
      for (std::size_t i = 0; i < proj->exprs.size(); ++i) {
        text += (i ? ", " : "") + fmt::format("{} AS {}", ex(proj->exprs[i]), proj->names[i]);
      }
      ops.push_back(std::make_unique<ProjectExec>(proj->exprs, proj->names, text));
    }
  }
  return std::make_shared<PhysicalPlan>(std::move(snapshot), std::move(ops), plan.output, plan.frame_slots, options);
}

ResultTable execute_inline(const PhysicalPlan& plan) {
  ExecState st{plan.snapshot(), plan.options(), {}, {}, {}, 0};
  st.frame.slots.resize(plan.frame_slots());
  for (const auto& op : plan.ops()) op->run(st);
  if (!st.result) throw Error(ErrorCode::Internal, "plan produced no result");
  return std::move(*st.result);
}

ResultTable execute(std::shared_ptr<const PhysicalPlan> plan) {
  auto task = std::async(std::launch::async, [plan] {
    try {
      return execute_inline(*plan);
    } catch (const Error&) {
      throw;
    } catch (const std::bad_alloc&) {
      throw Error(ErrorCode::ResourceLimitExceeded, "query ran out of memory");
    } catch (const std::exception& e) {
      throw Error(ErrorCode::EvaluationError, fmt::format("query failed: {}", e.what()));
    }
  });
  return task.get();
}

// ---------------------------------------------------------------------------
// Pattern evaluation

pattern::BehaviourBitmap evaluate_behaviours(std::span<const pattern::Behaviour> behaviours,
                                             const store::Snapshot& snapshot,
                                             const std::vector<std::uint32_t>* cases) {
  std::vector<std::uint32_t> all;
  if (!cases) {
    all.resize(snapshot.case_count());
    std::iota(all.begin(), all.end(), 0u);
    cases = &all;
  }
  EventRows ev = event_rows(snapshot, *cases);
  const std::size_t n = ev.event_idx.size();
  pattern::BehaviourBitmap bitmap;
  bitmap.event_count = snapshot.event_count();
  for (const auto& b : behaviours) {
    Vec v = evaluate(b.predicate, snapshot, n, ev.case_idx, ev.event_idx);
    std::vector<std::uint8_t> bits(snapshot.event_count(), 0);
    for (std::size_t i = 0; i < n; ++i) bits[ev.event_idx[i]] = v.valid[i] && v.ints[i];
    bitmap.bits.push_back(std::move(bits));
  }
  return bitmap;
}

std::vector<std::uint8_t> match_cases(const pattern::CompiledPattern& compiled, const store::Snapshot& snapshot,
                                      const pattern::BehaviourBitmap& bitmap, std::span<const std::uint32_t> cases,
                                      std::size_t workers) {
  std::vector<std::uint8_t> out(cases.size(), 0);
  auto run = [&](std::size_t begin, std::size_t end) {
    pattern::Matcher matcher(compiled);
    for (std::size_t i = begin; i < end; ++i) {
      pattern::CaseTrace trace{snapshot.case_begin(cases[i]), snapshot.case_end(cases[i])};
      out[i] = matcher.matches(trace, bitmap) ? 1 : 0;
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  constexpr std::size_t kMinCasesPerWorker = 4096;
  workers = std::min(workers, std::max<std::size_t>(1, cases.size() / kMinCasesPerWorker));
  if (workers <= 1) {
    run(0, cases.size());
    return out;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (cases.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk, end = std::min(cases.size(), begin + chunk);
    if (begin >= end) break;
    threads.emplace_back(run, begin, end);
  }
  for (auto& t : threads) t.join();
  return out;
}

}  // namespace signaldb::exec

namespace signaldb::pattern {

BehaviourBitmap evaluate_behaviours(std::span<const Behaviour> behaviours, const store::Snapshot& snapshot) {
  return exec::evaluate_behaviours(behaviours, snapshot, nullptr);
}

}  // namespace signaldb::pattern
