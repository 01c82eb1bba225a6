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

#include <doctest.h>

#include <future>

#include "fixtures.hpp"
#include "generators.hpp"
#include "signaldb/engine.hpp"
#include "signaldb/executor.hpp"
#include "signaldb/kernels.hpp"

using namespace signaldb;
using store::Level;

namespace {

std::shared_ptr<Engine> support_engine(exec::ExecOptions options = {}) {
  auto catalog = std::make_shared<store::Catalog>();
  catalog->add(testing::support_log());
  return std::make_shared<Engine>(catalog, options);
}

ResultTable run(const std::string& q, bool optimize = true) { return support_engine()->query(q, "support", optimize); }

ErrorCode run_error(const Engine& engine, const std::string& q) {
  try {
    engine.query(q, "support");
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error for " << q);
  return ErrorCode::Internal;
}

std::vector<std::vector<Value>> rows(const ResultTable& t) {
  std::vector<std::vector<Value>> out(t.row_count());
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    for (std::size_t c = 0; c < t.column_count(); ++c) out[r].push_back(t.at(r, c));
  }
  return out;
}

std::vector<std::uint32_t> iota(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
  return v;
}

std::string bit_string(const exec::Vec& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(!v.is_null(i) && v.ints[i] ? '1' : '0');
  return out;
}

// Queries over the support log used for optimizer and type soundness checks.
const std::vector<std::string>& query_corpus() {
  static const std::vector<std::string> q{
      testing::kReopenedQuery,
      testing::kClosedBlockedQuery,
      testing::kBlockedReopenedQuery,
      testing::kCycleTimeQuery,
      "SELECT case_id, (SELECT LAST(end_time) - FIRST(end_time)) AS cycle FROM THIS_PROCESS ORDER BY cycle DESC",
      "SELECT case_id FROM THIS_PROCESS ORDER BY case_id DESC LIMIT 1",
      "SELECT case_id FROM THIS_PROCESS LIMIT 1",
      "SELECT case_id FROM THIS_PROCESS LIMIT 0",
      "SELECT final_status, COUNT(*) AS n FROM THIS_PROCESS GROUP BY final_status ORDER BY final_status",
      "SELECT case_id, COUNT(*) FROM FLATTEN(THIS_PROCESS) GROUP BY case_id ORDER BY case_id",
      "SELECT * FROM FLATTEN(THIS_PROCESS) WHERE status IN ('open', 'blocked') LIMIT 3",
      "SELECT case_id, event_name MATCHES ('Open ticket' ~> 'Open ticket') AS reopened FROM THIS_PROCESS",
      "SELECT case_id FROM THIS_PROCESS WHERE final_status = 'done' AND event_name MATCHES (^ 'Open ticket')",
      "SELECT case_id, (SELECT FIRST(status)), (SELECT LAST(status)) FROM THIS_PROCESS",
      "SELECT case_id, (SELECT COUNT(*) FROM events WHERE status = 'blocked') FROM THIS_PROCESS LIMIT 1",
      "SELECT SUM((SELECT COUNT(*))), AVG((SELECT COUNT(*))), MIN(case_id), MAX(customer_id) FROM THIS_PROCESS",
      "SELECT case_id, (SELECT FIRST(end_time) FROM events WHERE event_name = 'Close ticket') FROM THIS_PROCESS",
      "SELECT COUNT(DISTINCT event_name), COUNT(status) FROM FLATTEN(THIS_PROCESS)",
      "SELECT event_name, MIN(end_time), MAX(end_time) FROM FLATTEN(THIS_PROCESS) GROUP BY event_name "
      "ORDER BY event_name",
      "SELECT case_id FROM THIS_PROCESS BEHAVIOUR (event_name = 'Open ticket') AS o "
      "WHERE MATCHES (^ (NOT o | (o ANY))* $)",
      "SELECT MILLIS((SELECT LAST(end_time) - FIRST(end_time))) / 2, MILLIS((SELECT LAST(end_time) - FIRST(end_time))) "
      "FROM THIS_PROCESS",
      "SELECT UPPER(case_id), LOWER(final_status) FROM THIS_PROCESS WHERE NOT (case_id = '1001')",
      "SELECT case_id, final_status FROM THIS_PROCESS ORDER BY final_status, case_id DESC LIMIT 5",
  };
  return q;
}

}  // namespace

TEST_SUITE("executor") {
  TEST_CASE("golden results") {
    std::vector<std::vector<Value>> only_1002{{Value::string("1002")}};
    CHECK(rows(run(testing::kReopenedQuery)) == only_1002);
    CHECK(rows(run(testing::kClosedBlockedQuery)) == only_1002);
    CHECK(rows(run(testing::kBlockedReopenedQuery)) == only_1002);
    auto avg = run(testing::kCycleTimeQuery);
    REQUIRE(avg.row_count() == 1);
    CHECK(avg.columns[0].type == ScalarType::Duration);
    CHECK(avg.at(0, 0) == Value::duration(200208880));
  }

  TEST_CASE("per-case cycle times") {
    auto t = run("SELECT case_id, (SELECT LAST(end_time) - FIRST(end_time)) FROM THIS_PROCESS");
    CHECK(rows(t) == std::vector<std::vector<Value>>{{Value::string("1001"), Value::duration(133451244)},
                                                     {Value::string("1002"), Value::duration(266966516)}});
  }

  TEST_CASE("vector_compare on support end times") {
    auto log = testing::support_log();
    auto snap = log->snapshot_all();
    const auto& col = snap->column({Level::Event, log->schema().end_time_index()});
    auto idx = iota(7);
    auto v = exec::Vec::gather(col, idx);
    auto r = exec::vector_compare(v, analyzer::BoundOp::Gt, exec::Vec::constant(Value::timestamp(1675200000000)));
    CHECK(bit_string(r) == "0010111");
    CHECK(exec::vector_filter(r) == std::vector<std::uint32_t>{2, 4, 5, 6});
  }

  TEST_CASE("three-valued logic") {
    exec::Vec t = exec::Vec::constant(Value::boolean(true));
    exec::Vec f = exec::Vec::constant(Value::boolean(false));
    exec::Vec n = exec::Vec::constant(Value::null(ScalarType::Boolean));
    using analyzer::BoundOp;
    CHECK(exec::vector_logic(n, BoundOp::And, f).get(0) == Value::boolean(false));
    CHECK(exec::vector_logic(n, BoundOp::And, t).get(0).is_null());
    CHECK(exec::vector_logic(n, BoundOp::Or, t).get(0) == Value::boolean(true));
    CHECK(exec::vector_logic(n, BoundOp::Or, f).get(0).is_null());
    CHECK(exec::vector_not(n).get(0).is_null());
    auto cmp = exec::vector_compare(exec::Vec::constant(Value::null(ScalarType::Number)), BoundOp::Eq,
                                    exec::Vec::constant(Value::number(1)));
    CHECK(cmp.get(0).is_null());
    CHECK(exec::vector_filter(cmp).empty());
  }

  TEST_CASE("arithmetic kernels") {
    using analyzer::BoundOp;
    auto div0 = exec::vector_arith(exec::Vec::constant(Value::number(1)), BoundOp::Div,
                                   exec::Vec::constant(Value::number(0)), ScalarType::Number);
    CHECK(div0.get(0).is_null());
    auto big = exec::Vec::constant(Value::duration(INT64_MAX - 1));
    CHECK_THROWS_AS(exec::vector_arith(big, BoundOp::Add, big, ScalarType::Duration), Error);
    auto diff = exec::vector_arith(exec::Vec::constant(Value::timestamp(300)), BoundOp::Sub,
                                   exec::Vec::constant(Value::timestamp(100)), ScalarType::Duration);
    CHECK(diff.get(0) == Value::duration(200));
  }

  TEST_CASE("limit kernel") {
    CHECK(exec::limit({1, 2, 3}, 0).empty());
    CHECK(exec::limit({1, 2, 3}, 2) == std::vector<std::uint32_t>{1, 2});
    CHECK(exec::limit({1, 2, 3}, 10).size() == 3);
    CHECK(run("SELECT case_id FROM THIS_PROCESS LIMIT 0").row_count() == 0);
  }

  TEST_CASE("hash_group on final_status") {
    auto log = testing::support_log();
    auto snap = log->snapshot_all();
    auto v = exec::Vec::gather(snap->column({Level::Case, 2}), iota(2));
    const exec::Vec* keys[] = {&v};
    auto g = exec::hash_group(keys, 2);
    REQUIRE(g.count() == 2);
    CHECK(v.get(g.first_row[0]) == Value::string("done"));
    CHECK(v.get(g.first_row[1]) == Value::string("blocked"));
    auto counts = run("SELECT final_status, COUNT(*) FROM THIS_PROCESS GROUP BY final_status");
    CHECK(rows(counts) == std::vector<std::vector<Value>>{{Value::string("done"), Value::number(1)},
                                                          {Value::string("blocked"), Value::number(1)}});
  }

  TEST_CASE("sort kernel puts NULLs first ascending and is stable") {
    exec::Vec v(ScalarType::Number, 5);
    v.set(0, Value::number(2));
    v.set_null(1);
    v.set(2, Value::number(1));
    v.set(3, Value::number(2));
    v.set(4, Value::number(1));
    const exec::Vec* keys[] = {&v};
    CHECK(exec::sort_rows(keys, {false}, 5) == std::vector<std::uint32_t>{1, 2, 4, 0, 3});
    CHECK(exec::sort_rows(keys, {true}, 5) == std::vector<std::uint32_t>{0, 3, 2, 4, 1});
  }

  TEST_CASE("property: positional FIRST/LAST equal the naive scan, including ties") {
    testing::Rng rng(9);
    std::uniform_int_distribution<std::int64_t> t(0, 3);
    std::uniform_int_distribution<int> len(1, 6);
    for (int i = 0; i < 200; ++i) {
      auto log = std::make_shared<store::EventLog>(
          "t", store::Schema::with_required({}, {{"v", ScalarType::Number}}));
      int cases = 1 + i % 9;
      int serial = 0;
      for (int c = 0; c < cases; ++c) {
        std::vector<store::ValueMap> evs;
        for (int e = len(rng); e > 0; --e) {
          evs.push_back({{"event_name", Value::string("e")},
                         {"end_time", Value::timestamp(t(rng))},
                         {"v", Value::number(serial++)}});
        }
        log->append_case({{"case_id", Value::string(std::to_string(c))}}, evs);
      }
      auto snap = log->snapshot_all();
      const auto& v = snap->column({Level::Event, 2});
      const auto& end = snap->column({Level::Event, 1});
      auto cases_idx = iota(snap->case_count());
      for (bool last : {false, true}) {
        auto fast = exec::first_last_positional(v, snap->offsets(), cases_idx, last);
        auto slow = exec::first_last_naive(v, end, snap->offsets(), cases_idx, last);
        for (std::size_t c = 0; c < cases_idx.size(); ++c) CHECK(fast.get(c) == slow.get(c));
      }
    }
  }

  TEST_CASE("property: GROUP BY case_id over FLATTEN counts each case's events") {
    testing::Rng rng(13);
    for (int i = 0; i < 50; ++i) {
      auto catalog = std::make_shared<store::Catalog>();
      auto log = testing::random_log(rng, "r");
      catalog->add(log);
      Engine engine(catalog);
      auto t = engine.query("SELECT case_id, COUNT(*) FROM FLATTEN(r) GROUP BY case_id", std::nullopt);
      auto snap = log->snapshot_all();
      REQUIRE(t.row_count() == snap->case_count());
      for (std::size_t c = 0; c < snap->case_count(); ++c) {
        CHECK(t.at(c, 1) == Value::number(static_cast<double>(snap->case_end(c) - snap->case_begin(c))));
      }
    }
  }

  TEST_CASE("property: optimized and unoptimized plans agree") {
    auto engine = support_engine();
    for (const auto& q : query_corpus()) {
      CAPTURE(q);
      CHECK(engine->query(q, "support", true) == engine->query(q, "support", false));
    }
  }

  TEST_CASE("property: result cells carry their column's declared type") {
    auto engine = support_engine();
    for (const auto& q : query_corpus()) {
      CAPTURE(q);
      auto plan = engine->plan(q, "support");
      auto t = engine->query(q, "support");
      REQUIRE(t.column_count() == plan.output.size());
      for (std::size_t c = 0; c < t.column_count(); ++c) {
        CHECK(t.columns[c].type == plan.output[c].type);
        for (const auto& v : t.columns[c].cells) CHECK(v.type() == plan.output[c].type);
      }
    }
  }

  TEST_CASE("determinism") {
    auto engine = support_engine();
    for (const auto& q : query_corpus()) {
      auto plan = engine->physical_plan(q, "support");
      CHECK(exec::execute(plan) == exec::execute(plan));
      CHECK(exec::execute(plan) == exec::execute_inline(*plan));
    }
  }

  TEST_CASE("plan snapshots") {
    auto engine = support_engine();
    CHECK(engine->plan(testing::kCycleTimeQuery, "support").describe() ==
          "Project(#0 AS AVG((SELECT (LAST(end_time) - FIRST(end_time)))))\n"
          "  Aggregate(keys=[], aggs=[AVG(#0)])\n"
          "    EventSubqueryEval(#0 = (agg#0 - agg#1) with [LAST(event.end_time)@boundary, "
          "FIRST(event.end_time)@boundary])\n"
          "      Scan(log=support, columns=[event.end_time])\n");
    CHECK(engine->plan("SELECT case_id FROM THIS_PROCESS LIMIT 1", "support").describe() ==
          "Project(case.case_id AS case_id)\n"
          "  Scan(log=support, columns=[case.case_id], limit=1)\n");
    CHECK(engine->plan("SELECT case_id FROM THIS_PROCESS ORDER BY case_id DESC LIMIT 1", "support").describe() ==
          "Project(case.case_id AS case_id)\n"
          "  Limit(1)\n"
          "    Sort(case.case_id DESC)\n"
          "      Scan(log=support, columns=[case.case_id])\n");
    CHECK(engine->physical_plan(testing::kCycleTimeQuery, "support")->op_names() ==
          std::vector<std::string>{"ColumnScan", "EventAggregateExec", "HashAggregate", "ProjectExec"});
    CHECK(engine->physical_plan(testing::kReopenedQuery, "support")->op_names() ==
          std::vector<std::string>{"ColumnScan", "BehaviourEval", "PatternFilterExec", "ProjectExec"});
    CHECK(engine->physical_plan("SELECT * FROM FLATTEN(THIS_PROCESS)", "support")->op_names() ==
          std::vector<std::string>{"ColumnScan", "FlattenExec", "ProjectExec"});
  }

  TEST_CASE("FIRST/LAST with a filter stay non-positional") {
    auto engine = support_engine();
    auto text = engine->plan("SELECT (SELECT FIRST(end_time) FROM events WHERE status = 'open') FROM THIS_PROCESS",
                             "support")
                    .describe();
    CHECK(text.find("@boundary") == std::string::npos);
  }

  TEST_CASE("case-level filters move below pattern filters") {
    auto engine = support_engine();
    auto text = engine->plan("SELECT case_id FROM THIS_PROCESS WHERE event_name MATCHES ('a') AND final_status = 'x'",
                             "support")
                    .describe();
    CHECK(text.find("Filter") > text.find("PatternFilter"));
  }

  TEST_CASE("column pruning") {
    auto engine = support_engine();
    auto cols = exec::required_columns(engine->plan(
        "SELECT case_id FROM THIS_PROCESS WHERE (SELECT LAST(end_time)) > 0", "support"));
    CHECK(cols == std::vector<store::ColumnId>{{Level::Case, 0}, {Level::Event, 1}});
  }

  TEST_CASE("snapshot missing a required column") {
    auto engine = support_engine();
    auto plan = engine->plan(testing::kReopenedQuery, "support");
    auto snap = engine->catalog().get("support")->snapshot(std::vector<store::ColumnId>{{Level::Case, 0}});
    try {
      exec::build_physical(plan, snap);
      FAIL("expected SnapshotColumnMissing");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SnapshotColumnMissing);
    }
  }

  TEST_CASE("runtime errors") {
    auto engine = support_engine();
    CHECK(run_error(*engine, "SELECT DURATION(9000000000000000000) + DURATION(9000000000000000000) FROM support") ==
          ErrorCode::EvaluationError);
    CHECK(run("SELECT COUNT(*) / 0 FROM THIS_PROCESS").at(0, 0).is_null());
    auto tight = support_engine({.max_cells = 4});
    CHECK(run_error(*tight, "SELECT * FROM FLATTEN(THIS_PROCESS)") == ErrorCode::ResourceLimitExceeded);
  }

  TEST_CASE("THIS_PROCESS binding") {
    auto engine = support_engine();
    try {
      engine->query(testing::kReopenedQuery, std::nullopt);
      FAIL("expected NoCurrentProcess");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoCurrentProcess);
    }
    try {
      engine->query(testing::kReopenedQuery, "missing");
      FAIL("expected UnknownLog");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownLog);
    }
    CHECK(engine->query("SELECT case_id FROM support LIMIT 1", std::nullopt).row_count() == 1);
  }

  TEST_CASE("NULL handling in aggregates") {
    auto catalog = std::make_shared<store::Catalog>();
    auto log = catalog->create_log("n", store::Schema::with_required({{"x", ScalarType::Number}}, {}));
    auto ev = store::ValueMap{{"event_name", Value::string("e")}, {"end_time", Value::timestamp(1)}};
    log->append_case({{"case_id", Value::string("1")}, {"x", Value::number(4)}}, {ev});
    log->append_case({{"case_id", Value::string("2")}, {"x", Value::null(ScalarType::Number)}}, {ev});
    Engine engine(catalog);
    auto t = engine.query("SELECT COUNT(*), COUNT(x), SUM(x), AVG(x), MIN(x) FROM n", std::nullopt);
    CHECK(rows(t) == std::vector<std::vector<Value>>{
                         {Value::number(2), Value::number(1), Value::number(4), Value::number(4), Value::number(4)}});
    auto empty = engine.query("SELECT SUM(x), COUNT(*) FROM n WHERE x > 100", std::nullopt);
    CHECK(empty.at(0, 0).is_null());
    CHECK(empty.at(0, 1) == Value::number(0));
  }

  TEST_CASE("snapshot isolation under concurrent queries and appends") {
    auto catalog = std::make_shared<store::Catalog>();
    auto log = testing::synthetic_support_log(200, 5, "s");
    catalog->add(log);
    Engine engine(catalog);
    const std::string q = "SELECT COUNT(*) FROM s WHERE event_name MATCHES ('Close ticket' ~> 'Open ticket')";
    auto before = engine.query(q, std::nullopt);
    std::vector<std::future<ResultTable>> futures;
    auto plan = engine.physical_plan(q, std::nullopt);
    for (int i = 0; i < 4; ++i) futures.push_back(std::async(std::launch::async, [&] { return exec::execute(plan); }));
    for (int c = 0; c < 50; ++c) {
      log->append_case({{"case_id", Value::string("new" + std::to_string(c))},
                        {"customer_id", Value::string("C")},
                        {"final_status", Value::string("blocked")}},
                       {{{"event_name", Value::string("Close ticket")}, {"end_time", Value::timestamp(1)},
                         {"status", Value::string("blocked")}},
                        {{"event_name", Value::string("Open ticket")}, {"end_time", Value::timestamp(2)},
                         {"status", Value::string("blocked")}}});
    }
    for (auto& f : futures) CHECK(f.get() == before);
    CHECK(engine.query(q, std::nullopt).at(0, 0) == Value::number(before.at(0, 0).as_number() + 50));
  }
}
