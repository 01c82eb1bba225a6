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

#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "fixtures.hpp"
#include "http_harness.hpp"
#include "signaldb/api.hpp"
#include "signaldb/http.hpp"
#include "signaldb/serialize.hpp"

using namespace signaldb;
namespace fs = std::filesystem;

namespace {

api::Session support_session() {
  api::Session s;
  s.engine->catalog().add(testing::support_log());
  return s;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string data_path(const std::string& name) { return std::string(SIGNALDB_TEST_DATA) + "/" + name; }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

nlohmann::json query_body(const std::string& q, const char* log = "support") {
  nlohmann::json j{{"query", q}};
  if (log) j["logId"] = log;
  return j;
}

}  // namespace

TEST_SUITE("api") {
  TEST_CASE("repl: open a log and run the reopened query") {
    auto s = support_session();
    std::istringstream in(std::string("\\open support;\n") + testing::kReopenedQuery + ";\n");
    std::ostringstream out, err;
    CHECK(api::repl_loop(s, in, out, err) == 0);
    CHECK(err.str().empty());
    CHECK(out.str().find("| 1002") != std::string::npos);
    CHECK(out.str().find("(1 row)") != std::string::npos);
  }

  TEST_CASE("repl: a syntax error is rendered and the loop continues") {
    auto s = support_session();
    std::istringstream in("\\open support\nSELECT FROM support;\nSELECT case_id\n  FROM support LIMIT 1;\n");
    std::ostringstream out, err;
    api::repl_loop(s, in, out, err);
    CHECK(err.str().find("error[SyntaxError]") != std::string::npos);
    CHECK(err.str().find("column 8") != std::string::npos);
    CHECK(err.str().find("       ^^^^") != std::string::npos);
    CHECK(out.str().find("1001") != std::string::npos);
  }

  TEST_CASE("repl: schema lists both levels with types") {
    auto s = support_session();
    std::istringstream in("\\open support\n\\schema\n");
    std::ostringstream out, err;
    api::repl_loop(s, in, out, err);
    const std::string text = out.str();
    CHECK(text.find("case attributes:") != std::string::npos);
    CHECK(text.find("event attributes:") != std::string::npos);
    for (const char* col : {"case_id", "customer_id", "final_status", "event_name", "end_time", "status"}) {
      CHECK(text.find(col) != std::string::npos);
    }
    CHECK(text.find("Timestamp") != std::string::npos);
  }

  TEST_CASE("repl: meta-commands") {
    auto s = support_session();
    std::istringstream in("\\logs\n\\format json\nSELECT COUNT(*) FROM support;\n\\format xml\n\\open nope\n"
                          "\\quit\nSELECT 1 FROM support;\n");
    std::ostringstream out, err;
    api::repl_loop(s, in, out, err);
    CHECK(out.str().find("support  cases=2 events=7") != std::string::npos);
    CHECK(out.str().find("{\"columns\":[{\"name\":\"COUNT(*)\",\"type\":\"Number\"}],\"rows\":[[2.0]]}") !=
          std::string::npos);
    CHECK(err.str().find("InvalidRequest") != std::string::npos);
    CHECK(err.str().find("UnknownLog") != std::string::npos);
    // Nothing runs after \quit.
    CHECK(out.str().find("\"1\"") == std::string::npos);
    CHECK(s.format == api::OutputFormat::Json);
  }

  TEST_CASE("repl: THIS_PROCESS without an open log") {
    auto s = support_session();
    std::istringstream in(std::string(testing::kReopenedQuery) + ";");
    std::ostringstream out, err;
    api::repl_loop(s, in, out, err);
    CHECK(err.str().find("NoCurrentProcess") != std::string::npos);
  }

  TEST_CASE("last_statement_end ignores quoted semicolons") {
    CHECK(api::last_statement_end("SELECT ';'") == std::nullopt);
    CHECK(api::last_statement_end("SELECT 1; -- ;\n") == 9u);
    CHECK(api::last_statement_end("a; b;") == 5u);
  }

  TEST_CASE("run_batch: the three reopened/blocked queries") {
    auto s = support_session();
    s.current_log = "support";
    std::ostringstream out, err;
    CHECK(api::run_batch(s, read_text(data_path("golden_queries.sql")), out, err) == 0);
    CHECK(err.str().empty());
    const std::string text = out.str();
    std::size_t blocks = 0;
    for (std::size_t pos = 0; (pos = text.find("(1 row)", pos)) != std::string::npos; ++pos) ++blocks;
    CHECK(blocks == 3);
  }

  TEST_CASE("run_batch: the first failure stops with exit 1") {
    auto s = support_session();
    s.current_log = "support";
    std::ostringstream out, err;
    CHECK(api::run_batch(s, "SELECT case_id FROM support; SELECT end_time FROM THIS_PROCESS; SELECT 1 FROM support;",
                         out, err) == 1);
    CHECK(err.str().find("LevelError") != std::string::npos);
    CHECK(out.str().find("(2 rows)") != std::string::npos);
    CHECK(out.str().find("(1 row)") == std::string::npos);
  }

  TEST_CASE("run_batch: an empty script") {
    auto s = support_session();
    std::ostringstream out, err;
    CHECK(api::run_batch(s, "", out, err) == 0);
    CHECK(api::run_batch(s, "  -- nothing\n;\n", out, err) == 0);
    CHECK(out.str().empty());
    CHECK(err.str().empty());
  }

  TEST_CASE("run_batch: csv output") {
    auto s = support_session();
    s.current_log = "support";
    s.format = api::OutputFormat::Csv;
    std::ostringstream out, err;
    api::run_batch(s, "SELECT case_id, final_status FROM THIS_PROCESS", out, err);
    CHECK(out.str() == "case_id,final_status\n1001,done\n1002,blocked\n");
  }

  TEST_CASE("load_log_file uses the side config") {
    auto log = api::load_log_file(data_path("support.csv"), "s");
    CHECK(store::flatten(*log) == store::flatten(*testing::support_log()));
    CHECK_THROWS_AS(api::load_log_file(data_path("missing.csv"), "s"), Error);
    CHECK_THROWS_AS(api::load_log_file(data_path("golden_queries.sql"), "s"), Error);
  }

  TEST_CASE("http: cycle-time query returns the average cycle time") {
    api::Service service(support_session().engine);
    auto r = service.post_query(query_body(testing::kCycleTimeQuery).dump());
    CHECK(r.status == 200);
    auto j = nlohmann::json::parse(r.body);
    CHECK(j["rows"] == nlohmann::json::parse("[[200208880]]"));
    CHECK(j["columns"][0]["type"] == "Duration");
  }

  TEST_CASE("http: responses are the library serializations") {
    auto engine = support_session().engine;
    api::Service service(engine);
    for (const char* q : {testing::kReopenedQuery, testing::kClosedBlockedQuery, testing::kBlockedReopenedQuery,
                          testing::kCycleTimeQuery}) {
      CHECK(service.post_query(query_body(q).dump()).body == to_json_string(engine->query(q, "support")));
    }
    try {
      engine->query("SELECT nope FROM support", std::nullopt);
    } catch (const Error& e) {
      auto r = service.post_query(query_body("SELECT nope FROM support", nullptr).dump());
      CHECK(r.status == 400);
      CHECK(r.body == to_json(Diagnostic::from(e)).dump());
      CHECK(nlohmann::json::parse(r.body)["error"]["code"] == "UnknownColumn");
    }
  }

  TEST_CASE("http: status codes") {
    api::Service service(support_session().engine);
    CHECK(service.post_query("not json").status == 400);
    CHECK(service.post_query("{\"query\": 1}").status == 400);
    CHECK(service.post_query(query_body("SELECT FROM").dump()).status == 400);
    CHECK(service.post_query(query_body(testing::kReopenedQuery, "nope").dump()).status == 404);
    CHECK(service.post_query(query_body(testing::kReopenedQuery, nullptr).dump()).status == 400);
    CHECK(service.delete_log("nope").status == 404);
    CHECK(service.post_log("x.csv", read_text(data_path("support.csv")), "", "support").status == 409);
    CHECK(service.post_log("x.csv", "case_id\n1\n", "", "bad").status == 400);
    CHECK(service.post_log("x.csv", "", "{", "ok").status == 400);
    CHECK(service.post_log("x.csv", "", "", "../etc").status == 400);
    api::Service tiny(support_session().engine, {std::nullopt, 10});
    CHECK(tiny.post_log("x.csv", read_text(data_path("support.csv")), "", "big").status == 413);
  }

  TEST_CASE("http: upload, list and delete") {
    api::Service service(std::make_shared<Engine>());
    auto r = service.post_log("support.csv", read_text(data_path("support.csv")),
                              read_text(data_path("support.json")), "support");
    CHECK(r.status == 201);
    CHECK(nlohmann::json::parse(r.body) == nlohmann::json{{"logId", "support"}, {"cases", 2}, {"events", 7}});
    auto list = nlohmann::json::parse(service.get_logs().body);
    REQUIRE(list.size() == 1);
    CHECK(list[0]["logId"] == "support");
    CHECK(list[0]["cases"] == 2);
    CHECK(list[0]["events"] == 7);
    CHECK(list[0]["schema"]["case"].size() == 3);
    CHECK(service.delete_log("support").status == 204);
    CHECK(nlohmann::json::parse(service.get_logs().body).empty());
  }

  TEST_CASE("http: uploads persist to the data directory") {
    TempDir dir("signaldb_api_test_data");
    {
      api::Service service(std::make_shared<Engine>(), {dir.path.string(), 1 << 20});
      CHECK(service.post_log("t.tsv", "case_id\tevent_name\tend_time\n1\ta\t5\n", "", "tabbed").status == 201);
      CHECK(service.post_log("s.csv", read_text(data_path("support.csv")), read_text(data_path("support.json")),
                             "support")
                .status == 201);
    }
    store::Catalog catalog;
    CHECK(api::load_data_dir(catalog, dir.path.string()) == std::vector<std::string>{"support", "tabbed"});
    CHECK(catalog.get("tabbed")->event_count() == 1);
    {
      api::Service service(std::make_shared<Engine>(), {dir.path.string(), 1 << 20});
      service.engine()->catalog().add(catalog.get("tabbed"));
      CHECK(service.delete_log("tabbed").status == 204);
    }
    store::Catalog again;
    CHECK(api::load_data_dir(again, dir.path.string()) == std::vector<std::string>{"support"});
  }

  TEST_CASE("http: routes over a socket") {
    api::Service service(support_session().engine);
    testing::LocalServer server(service);
    auto client = server.client();
    auto r = client.Post("/signal/queries", query_body(testing::kReopenedQuery).dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->body == service.post_query(query_body(testing::kReopenedQuery).dump()).body);

    httplib::MultipartFormDataItems items{
        {"file", read_text(data_path("support.csv")), "support.csv", "text/csv"},
        {"config", read_text(data_path("support.json")), "", ""},
        {"logId", "copy", "", ""},
    };
    auto up = client.Post("/logs", items);
    REQUIRE(up);
    CHECK(up->status == 201);
    auto list = client.Get("/logs");
    REQUIRE(list);
    CHECK(nlohmann::json::parse(list->body).size() == 2);
    auto del = client.Delete("/logs/copy");
    REQUIRE(del);
    CHECK(del->status == 204);
    auto missing = client.Get("/nothing");
    REQUIRE(missing);
    CHECK(missing->status == 404);
  }

  TEST_CASE("http: concurrent queries return identical bodies") {
    api::Service service(support_session().engine);
    testing::LocalServer server(service);
    const std::string expected = service.post_query(query_body(testing::kCycleTimeQuery).dump()).body;
    std::vector<std::future<bool>> results;
    for (int t = 0; t < 8; ++t) {
      results.push_back(std::async(std::launch::async, [&] {
        auto client = server.client();
        for (int i = 0; i < 10; ++i) {
          auto r = client.Post("/signal/queries", query_body(testing::kCycleTimeQuery).dump(), "application/json");
          if (!r || r->status != 200 || r->body != expected) return false;
        }
        return true;
      }));
    }
    for (auto& f : results) CHECK(f.get());
  }
}
