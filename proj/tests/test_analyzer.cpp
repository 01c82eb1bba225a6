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

#include "fixtures.hpp"
#include "signaldb/analyzer.hpp"
#include "signaldb/parser.hpp"

using namespace signaldb;
using analyzer::LogicalPlan;
using store::Level;

namespace {

LogicalPlan plan_of(const std::string& q) {
  return analyzer::analyze(parser::parse_query(q), testing::support_schema(), "support");
}

ErrorCode code_of(const std::string& q, Span* span = nullptr) {
  try {
    plan_of(q);
  } catch (const Error& e) {
    if (span) *span = e.span();
    return e.code();
  }
  FAIL("expected an error for " << q);
  return ErrorCode::Internal;
}

analyzer::TypedExpr typed(const std::string& expr, Level context = Level::Case) {
  auto q = parser::parse_query("SELECT " + expr + " FROM x");
  return analyzer::type_of(q.select[0].expr, testing::support_schema(), context);
}

std::vector<std::string> op_names(const LogicalPlan& p) {
  std::vector<std::string> out;
  for (const auto& op : p.ops) out.emplace_back(analyzer::op_name(op));
  return out;
}

}  // namespace

TEST_SUITE("analyzer") {
  TEST_CASE("cycle-time plan shape") {
    auto p = plan_of(testing::kCycleTimeQuery);
    CHECK(op_names(p) == std::vector<std::string>{"Scan", "EventSubqueryEval", "Aggregate", "Project"});
    REQUIRE(p.output.size() == 1);
    CHECK(p.output[0].type == ScalarType::Duration);
  }

  TEST_CASE("pattern query plan shape") {
    CHECK(op_names(plan_of(testing::kReopenedQuery)) ==
          std::vector<std::string>{"Scan", "PatternFilter", "Project"});
    CHECK(op_names(plan_of(testing::kClosedBlockedQuery)) ==
          std::vector<std::string>{"Scan", "PatternFilter", "Project"});
    CHECK(op_names(plan_of("SELECT * FROM FLATTEN(THIS_PROCESS) LIMIT 2")) ==
          std::vector<std::string>{"Scan", "Flatten", "Project", "Limit"});
  }

  TEST_CASE("type_of examples") {
    auto cycle = typed("(SELECT LAST(end_time) - FIRST(end_time))");
    CHECK(cycle.type == ScalarType::Duration);
    CHECK(cycle.level == Level::Case);
    auto inner = typed("LAST(end_time) - FIRST(end_time)", Level::Event);
    CHECK(inner.type == ScalarType::Duration);
    auto pred = typed("event_name = 'Close ticket' AND \"status\" = 'blocked'");
    CHECK(pred.type == ScalarType::Boolean);
    CHECK(pred.level == Level::Event);
    CHECK(typed("case_id").level == Level::Case);
    CHECK(typed("1 + 2 * 3").type == ScalarType::Number);
    CHECK(typed("event_name MATCHES ('a' ~> 'b')").type == ScalarType::Boolean);
    CHECK(typed("event_name MATCHES ('a' ~> 'b')").level == Level::Case);
  }

  TEST_CASE("arithmetic type rules") {
    auto t = [](const std::string& e) { return typed("(SELECT " + e + ")").type; };
    CHECK(t("LAST(end_time) - FIRST(end_time)") == ScalarType::Duration);
    CHECK(t("LAST(end_time) + (LAST(end_time) - FIRST(end_time))") == ScalarType::Timestamp);
    CHECK(t("LAST(end_time) - (LAST(end_time) - FIRST(end_time))") == ScalarType::Timestamp);
    CHECK(t("(LAST(end_time) - FIRST(end_time)) + (LAST(end_time) - FIRST(end_time))") == ScalarType::Duration);
    for (const char* bad : {"LAST(end_time) + FIRST(end_time)", "LAST(end_time) * 2", "LAST(end_time) - 1",
                            "(LAST(end_time) - FIRST(end_time)) + 1", "LAST(event_name) + 1"}) {
      CAPTURE(bad);
      try {
        t(bad);
        FAIL("expected TypeError");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TypeError);
      }
    }
  }

  TEST_CASE("'a' + 1 is a TypeError") {
    Span span;
    CHECK(code_of("SELECT 'a' + 1 FROM support", &span) == ErrorCode::TypeError);
    CHECK(span == Span{7, 14});
  }

  TEST_CASE("end_time at case level is a LevelError") {
    Span span;
    CHECK(code_of("SELECT end_time FROM THIS_PROCESS", &span) == ErrorCode::LevelError);
    CHECK(span == Span{7, 15});
    CHECK(code_of("SELECT case_id FROM support ORDER BY status") == ErrorCode::LevelError);
    CHECK(code_of("SELECT COUNT(*) FROM support GROUP BY event_name") == ErrorCode::LevelError);
    CHECK(code_of("SELECT SUM(end_time - end_time) FROM support") == ErrorCode::LevelError);
    CHECK(code_of("SELECT (SELECT (SELECT COUNT(*))) FROM support") == ErrorCode::LevelError);
  }

  TEST_CASE("non-aggregating event subquery") {
    CHECK(code_of("SELECT case_id FROM THIS_PROCESS WHERE (SELECT end_time) > 0") == ErrorCode::NonAggregatedSubquery);
    CHECK(code_of("SELECT (SELECT status) FROM support") == ErrorCode::NonAggregatedSubquery);
    CHECK(code_of("SELECT (SELECT FIRST(end_time) + (end_time - end_time)) FROM support") == ErrorCode::NonAggregatedSubquery);
  }

  TEST_CASE("other analysis errors") {
    CHECK(code_of("SELECT nope FROM support") == ErrorCode::UnknownColumn);
    CHECK(code_of("SELECT case_id FROM support BEHAVIOUR (end_time) AS b WHERE MATCHES (b)") ==
          ErrorCode::NonBooleanBehaviour);
    CHECK(code_of("SELECT case_id FROM support BEHAVIOUR (status = 'a') AS b BEHAVIOUR (status = 'b') AS B "
                  "WHERE MATCHES (b)") == ErrorCode::DuplicateBehaviour);
    CHECK(code_of("SELECT case_id FROM support BEHAVIOUR (status = 'a') AS status WHERE MATCHES (status)") ==
          ErrorCode::DuplicateBehaviour);
    CHECK(code_of("SELECT case_id FROM support WHERE MATCHES (zzz)") == ErrorCode::UnknownBehaviour);
    CHECK(code_of("SELECT * FROM FLATTEN(support) WHERE event_name MATCHES ('a')") == ErrorCode::MatchesOnFlattened);
    CHECK(code_of("SELECT FIRST(case_id) FROM support") == ErrorCode::InvalidAggregate);
    CHECK(code_of("SELECT AVG(case_id) FROM support") == ErrorCode::TypeError);
    CHECK(code_of("SELECT AVG((SELECT LAST(end_time))) FROM support") == ErrorCode::TypeError);
    CHECK(code_of("SELECT SUM(COUNT(*)) FROM support") == ErrorCode::InvalidAggregate);
    CHECK(code_of("SELECT frobnicate(case_id) FROM support") == ErrorCode::UnknownFunction);
    CHECK(code_of("SELECT case_id, COUNT(*) FROM support") == ErrorCode::GroupingError);
    CHECK(code_of("SELECT customer_id FROM support GROUP BY final_status") == ErrorCode::GroupingError);
    CHECK(code_of("SELECT case_id FROM support WHERE case_id") == ErrorCode::TypeError);
    CHECK(code_of("SELECT case_id FROM support WHERE case_id = 1") == ErrorCode::TypeError);
  }

  TEST_CASE("FIRST and LAST are accepted inside event subqueries") {
    CHECK_NOTHROW(plan_of("SELECT (SELECT FIRST(status)), (SELECT LAST(event_name)) FROM support"));
    CHECK_NOTHROW(plan_of("SELECT MAX((SELECT COUNT(*) FROM events WHERE status = 'open')) FROM support"));
    CHECK_NOTHROW(plan_of("SELECT COUNT(*), MIN(case_id) FROM support"));
  }

  TEST_CASE("case columns inside an event subquery are per-case constants") {
    CHECK_NOTHROW(plan_of("SELECT (SELECT COUNT(*) FROM events WHERE status = final_status) FROM support"));
  }

  TEST_CASE("MATCHES as a value and combined conditions") {
    auto p = plan_of("SELECT case_id, event_name MATCHES ('Open ticket' ~> 'Open ticket') AS reopened FROM support");
    CHECK(p.output[1].type == ScalarType::Boolean);
    CHECK_NOTHROW(plan_of("SELECT case_id FROM support WHERE NOT MATCHES ('Close ticket') OR final_status = 'done'"));
  }

  TEST_CASE("output names and SELECT *") {
    auto p = plan_of("SELECT case_id AS id, COUNT(*) FROM support GROUP BY case_id ORDER BY 2 DESC, id");
    CHECK(p.output[0].name == "id");
    CHECK(p.output[1].type == ScalarType::Number);
    auto star = plan_of("SELECT * FROM support");
    CHECK(star.output.size() == 3);
    auto flat = plan_of("SELECT * FROM FLATTEN(support)");
    CHECK(flat.output.size() == 6);
    CHECK(flat.output[4].type == ScalarType::Timestamp);
  }

  TEST_CASE("analysis is deterministic") {
    for (const char* q : {testing::kReopenedQuery, testing::kClosedBlockedQuery, testing::kBlockedReopenedQuery,
                          testing::kCycleTimeQuery}) {
      CHECK(plan_of(q).describe() == plan_of(q).describe());
    }
  }

  TEST_CASE("source_log") {
    CHECK(analyzer::source_log(parser::parse_query("SELECT a FROM support")) == "support");
    CHECK_FALSE(analyzer::source_log(parser::parse_query("SELECT a FROM THIS_PROCESS")).has_value());
    CHECK(analyzer::source_log(parser::parse_query("SELECT a FROM FLATTEN(x)")) == "x");
  }
}
