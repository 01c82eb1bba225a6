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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "generators.hpp"
#include "http_harness.hpp"
#include "signaldb/engine.hpp"
#include "signaldb/ingestion.hpp"
#include "signaldb/parser.hpp"
#include "signaldb/serialize.hpp"

using namespace signaldb;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kGoldenSeconds = 1.0;
constexpr double kOracleSeconds = 60.0;
constexpr double kAvgSeconds = 5.0;
constexpr double kPatternSeconds = 10.0;
constexpr int kOracleInstances = 10'000;
constexpr int kIdentityTraces = 1'000;
constexpr int kDesugarInstances = 1'000;
constexpr int kRoundTripLogs = 100;
constexpr std::size_t kPerfCases = 100'000;
constexpr std::size_t kPerfEventsPerCase = 10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::shared_ptr<Engine> support_engine() {
  auto catalog = std::make_shared<store::Catalog>();
  catalog->add(testing::support_log());
  return std::make_shared<Engine>(catalog);
}

ResultTable single_string_column(const std::string& name, std::vector<std::string> values) {
  ResultTable t;
  t.columns.push_back({name, ScalarType::String, {}});
  for (auto& v : values) t.columns[0].cells.push_back(Value::string(std::move(v)));
  return t;
}

Outcome golden_suite() {
  auto start = Clock::now();
  auto engine = support_engine();
  const auto only_1002 = single_string_column("case_id", {"1002"});
  Outcome out;
  for (const char* q : {testing::kReopenedQuery, testing::kClosedBlockedQuery, testing::kBlockedReopenedQuery}) {
    if (engine->query(q, "support") != only_1002) {
      out.pass = false;
      out.detail += std::string(" wrong result for: ") + q;
    }
  }
  auto avg = engine->query(testing::kCycleTimeQuery, "support");
  if (avg.row_count() != 1 || avg.at(0, 0) != Value::duration(200208880)) {
    out.pass = false;
    out.detail += " average cycle time is not 200208880 ms";
  }
  auto per_case = engine->query("SELECT (SELECT LAST(end_time) - FIRST(end_time)) FROM THIS_PROCESS", "support");
  if (per_case.row_count() != 2 || per_case.at(0, 0) != Value::duration(133451244) ||
      per_case.at(1, 0) != Value::duration(266966516)) {
    out.pass = false;
    out.detail += " per-case cycle times differ from 133451244/266966516 ms";
  }
  double secs = seconds_since(start);
  if (secs >= kGoldenSeconds) out.pass = false;
  out.detail = "4 queries in " + std::to_string(secs) + " s (limit 1 s)" + out.detail;
  return out;
}

bool nfa_match(const parser::Pattern& p, const testing::RandomTrace& t) {
  auto compiled = pattern::compile(p, testing::abc());
  return pattern::match_case(compiled, t.trace, t.bitmap);
}

Outcome oracle_equivalence() {
  auto start = Clock::now();
  testing::Rng rng(20260101);
  int discrepancies = 0;
  std::string first;
  for (int i = 0; i < kOracleInstances; ++i) {
    auto p = testing::random_pattern(rng, 4);
    auto t = testing::random_overlapping_trace(rng, 10);
    if (nfa_match(p, t) != pattern::brute_force_match(p, t.trace, t.bitmap, testing::abc())) {
      if (discrepancies++ == 0) first = " first: " + parser::print(p);
    }
  }
  double secs = seconds_since(start);
  return {discrepancies == 0 && secs < kOracleSeconds,
          std::to_string(kOracleInstances) + " instances, " + std::to_string(discrepancies) + " discrepancies, " +
              std::to_string(secs) + " s (limit 60 s)" + first};
}

Outcome operator_table() {
  int ok = 0;
  std::string failures;
  for (const auto& row : testing::operator_examples()) {
    auto p = parser::parse_pattern(row.pattern);
    bool pos = nfa_match(p, testing::trace_of(row.matching));
    bool neg = nfa_match(p, testing::trace_of(row.perturbed));
    if (pos) ++ok;
    if (!neg) ++ok;
    if (!pos || neg) failures += std::string(" ") + row.pattern;
  }
  return {ok == 16, std::to_string(ok) + "/16 rows as expected (8 matching, 8 perturbed)" + failures};
}

Outcome universal_identity() {
  testing::Rng rng(4242);
  auto p = parser::parse_pattern("(^ (NOT a | (a b))* $)");
  int discrepancies = 0;
  for (int i = 0; i < kIdentityTraces; ++i) {
    std::vector<int> labels;
    auto t = testing::random_labelled_trace(rng, 10, &labels);
    bool every_a_followed = true;
    for (std::size_t e = 0; e < labels.size(); ++e) {
      if (labels[e] == 0 && (e + 1 == labels.size() || labels[e + 1] != 1)) every_a_followed = false;
    }
    if (nfa_match(p, t) != every_a_followed) ++discrepancies;
  }
  return {discrepancies == 0,
          std::to_string(kIdentityTraces) + " traces, " + std::to_string(discrepancies) + " discrepancies"};
}

Outcome desugar_identities() {
  testing::Rng rng(777);
  using parser::Pattern;
  using K = Pattern::Kind;
  int discrepancies = 0;
  for (int i = 0; i < kDesugarInstances; ++i) {
    auto a = testing::random_body(rng, 2);
    auto b = testing::random_body(rng, 2);
    auto t = testing::random_overlapping_trace(rng, 10);
    auto follows = Pattern::binary(K::EventualFollow, a, b);
    auto any_star = Pattern::binary(K::Concat, Pattern::binary(K::Concat, a, Pattern::star(Pattern::any())), b);
    auto direct = Pattern::binary(K::DirectFollow, a, b);
    auto concat = Pattern::binary(K::Concat, a, b);
    if (nfa_match(follows, t) != nfa_match(any_star, t)) ++discrepancies;
    if (nfa_match(direct, t) != nfa_match(concat, t)) ++discrepancies;
  }
  return {discrepancies == 0,
          std::to_string(kDesugarInstances) + " instances, " + std::to_string(discrepancies) + " discrepancies"};
}

Outcome type_rejections() {
  auto engine = support_engine();
  struct Case {
    const char* query;
    ErrorCode expected;
  };
  const Case cases[] = {
      {"SELECT end_time FROM support", ErrorCode::LevelError},
      {"SELECT case_id FROM support WHERE (SELECT end_time) > 0", ErrorCode::NonAggregatedSubquery},
      {"SELECT 'a' + 1 FROM support", ErrorCode::TypeError},
  };
  Outcome out{true, ""};
  for (const auto& c : cases) {
    ErrorCode got = ErrorCode::Internal;
    bool threw = false;
    try {
      engine->plan(c.query, std::nullopt);
    } catch (const Error& e) {
      threw = true;
      got = e.code();
    }
    out.detail += std::string(out.detail.empty() ? "" : ", ") + std::string(error_code_name(c.expected)) + "=" +
                  (threw ? std::string(error_code_name(got)) : "none");
    if (!threw || got != c.expected) out.pass = false;
  }
  return out;
}

Outcome optimizer_soundness() {
  auto engine = support_engine();
  Outcome out{true, ""};
  int equal = 0;
  const char* queries[] = {testing::kReopenedQuery, testing::kClosedBlockedQuery, testing::kBlockedReopenedQuery,
                           testing::kCycleTimeQuery, "SELECT case_id FROM THIS_PROCESS ORDER BY case_id DESC LIMIT 1",
                           "SELECT case_id FROM THIS_PROCESS LIMIT 1"};
  for (const char* q : queries) {
    if (engine->query(q, "support", true) == engine->query(q, "support", false)) {
      ++equal;
    } else {
      out.pass = false;
    }
  }
  out.detail = std::to_string(equal) + "/6 queries agree";

  // LIMIT sits below the projection after optimization.
  auto limited = engine->plan("SELECT case_id FROM THIS_PROCESS ORDER BY case_id DESC LIMIT 1", "support");
  std::ptrdiff_t limit_at = -1, project_at = -1;
  for (std::size_t i = 0; i < limited.ops.size(); ++i) {
    if (analyzer::op_name(limited.ops[i]) == "Limit") limit_at = static_cast<std::ptrdiff_t>(i);
    if (analyzer::op_name(limited.ops[i]) == "Project") project_at = static_cast<std::ptrdiff_t>(i);
  }
  bool limit_below = limit_at >= 0 && project_at > limit_at;
  auto scan_limited = engine->plan("SELECT case_id FROM THIS_PROCESS LIMIT 1", "support");
  bool into_scan = std::get<analyzer::ScanOp>(scan_limited.ops.front()).limit == 1;
  if (!limit_below || !into_scan) out.pass = false;
  out.detail += limit_below && into_scan ? ", LIMIT below projection" : ", LIMIT not pushed down";

  // FIRST/LAST compile to positional reads.
  auto cycle = engine->plan(testing::kCycleTimeQuery, "support");
  bool positional = false;
  for (const auto& op : cycle.ops) {
    if (const auto* sq = std::get_if<analyzer::EventSubqueryOp>(&op)) {
      positional = !sq->subqueries.empty();
      for (const auto& s : sq->subqueries) {
        for (const auto& a : s.aggs) positional = positional && a.positional;
      }
    }
  }
  auto before = exec::kernel_stats().positional_reads.load();
  engine->query(testing::kCycleTimeQuery, "support");
  bool used = exec::kernel_stats().positional_reads.load() > before;
  if (!positional || !used) out.pass = false;
  out.detail += positional && used ? ", FIRST/LAST positional" : ", FIRST/LAST not positional";
  return out;
}

Outcome csv_round_trip() {
  testing::Rng rng(8080);
  int ok = 0;
  std::string first;
  for (int i = 0; i < kRoundTripLogs; ++i) {
    auto log = testing::random_log(rng, "r");
    ingest::CsvIngestConfig cfg;
    cfg.timestamp_format = "epoch_millis";
    for (auto level : {store::Level::Case, store::Level::Event}) {
      for (const auto& a : log->schema().attributes(level)) {
        cfg.level_overrides[a.name] = level;
        cfg.type_overrides[a.name] = a.type;
      }
    }
    try {
      std::istringstream in(to_csv(store::flatten(*log)));
      auto back = ingest::ingest_csv(in, cfg, "r");
      if (back->schema() == log->schema() && store::flatten(*back) == store::flatten(*log)) {
        ++ok;
        continue;
      }
      if (first.empty()) first = " first mismatch at log " + std::to_string(i);
    } catch (const Error& e) {
      if (first.empty()) first = std::string(" first error: ") + e.what();
    }
  }
  return {ok == kRoundTripLogs, std::to_string(ok) + "/" + std::to_string(kRoundTripLogs) + " logs reproduced" + first};
}

Outcome performance() {
  auto build_start = Clock::now();
  auto catalog = std::make_shared<store::Catalog>();
  auto log = testing::synthetic_support_log(kPerfCases, kPerfEventsPerCase, "perf");
  catalog->add(log);
  double build_secs = seconds_since(build_start);
  Engine engine(catalog);

  exec::kernel_stats().sorts = 0;
  auto avg_start = Clock::now();
  auto avg = engine.query(testing::kCycleTimeQuery, "perf");
  double avg_secs = seconds_since(avg_start);
  std::uint64_t sorts = exec::kernel_stats().sorts.load();

  auto pattern_start = Clock::now();
  auto matched = engine.query(testing::kReopenedQuery, "perf");
  double pattern_secs = seconds_since(pattern_start);

  bool sane = avg.row_count() == 1 && !avg.at(0, 0).is_null() && matched.row_count() > 0 &&
              matched.row_count() < kPerfCases;
  bool pass = log->event_count() == kPerfCases * kPerfEventsPerCase && avg_secs < kAvgSeconds &&
              pattern_secs < kPatternSeconds && sorts == 0 && sane;
  return {pass, std::to_string(log->case_count()) + " cases/" + std::to_string(log->event_count()) +
                    " events (built in " + std::to_string(build_secs) + " s): AVG " + std::to_string(avg_secs) +
                    " s (limit 5 s), pattern " + std::to_string(pattern_secs) + " s (limit 10 s), " +
                    std::to_string(matched.row_count()) + " matches, sorts=" + std::to_string(sorts)};
}

Outcome http_contract() {
  auto engine = support_engine();
  api::Service service(engine);
  testing::LocalServer server(service);
  auto client = server.client();
  Outcome out{true, ""};
  int stable = 0;
  for (const char* q : {testing::kReopenedQuery, testing::kClosedBlockedQuery, testing::kBlockedReopenedQuery}) {
    const std::string body = nlohmann::json{{"query", q}, {"logId", "support"}}.dump();
    const std::string expected = to_json_string(engine->query(q, "support"));
    auto r1 = client.Post("/signal/queries", body, "application/json");
    auto r2 = client.Post("/signal/queries", body, "application/json");
    if (r1 && r2 && r1->status == 200 && r1->body == expected && r2->body == expected) {
      ++stable;
    } else {
      out.pass = false;
    }
  }
  out.detail = std::to_string(stable) + "/3 queries byte-identical to the library JSON";
  auto bad = client.Post("/signal/queries", R"({"query": "SELECT FROM support", "logId": "support"})",
                         "application/json");
  bool bad_ok = false;
  if (bad && bad->status == 400) {
    auto j = nlohmann::json::parse(bad->body, nullptr, false);
    bad_ok = !j.is_discarded() && j["error"]["code"] == "SyntaxError" && j["error"]["span"]["begin"] == 7 &&
             j["error"]["span"]["end"] == 11;
  }
  if (!bad_ok) out.pass = false;
  out.detail += bad_ok ? ", malformed query gives 400 SyntaxError at [7, 11)" : ", malformed query response wrong";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "golden query suite", golden_suite},
      {2, "pattern oracle equivalence", oracle_equivalence},
      {3, "operator table conformance", operator_table},
      {4, "universal-via-negation identity", universal_identity},
      {5, "desugaring identities", desugar_identities},
      {6, "type-system rejections", type_rejections},
      {7, "optimizer soundness and plan shape", optimizer_soundness},
      {8, "CSV round-trip of flatten", csv_round_trip},
      {9, "performance smoke", performance},
      {10, "HTTP contract", http_contract},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
