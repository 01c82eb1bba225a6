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

#include <memory>
#include <string>
#include <vector>

#include "signaldb/store.hpp"

namespace signaldb::testing {

inline store::Schema support_schema() {
  return store::Schema::with_required({{"customer_id", ScalarType::String}, {"final_status", ScalarType::String}},
                                      {{"status", ScalarType::String}});
}

// The two support tickets of the columnar-model table.
inline store::EventLogPtr support_log(const std::string& log_id = "support") {
  auto log = std::make_shared<store::EventLog>(log_id, support_schema());
  auto ev = [](const char* name, std::int64_t t, const char* status) {
    return store::ValueMap{{"event_name", Value::string(name)},
                           {"end_time", Value::timestamp(t)},
                           {"status", Value::string(status)}};
  };
  log->append_case({{"case_id", Value::string("1001")},
                    {"customer_id", Value::string("C2001")},
                    {"final_status", Value::string("done")}},
                   {ev("Open ticket", 1675086864052, "none"), ev("Assign ticket", 1675160180724, "open"),
                    ev("Close ticket", 1675220315296, "done")});
  log->append_case({{"case_id", Value::string("1002")},
                    {"customer_id", Value::string("C2002")},
                    {"final_status", Value::string("blocked")}},
                   {ev("Open ticket", 1675147138009, "none"), ev("Assign ticket", 1675213914098, "open"),
                    ev("Close ticket", 1675282027657, "blocked"), ev("Open ticket", 1675414104525, "blocked")});
  return log;
}

inline const char* kReopenedQuery =
    "SELECT case_id FROM THIS_PROCESS WHERE event_name MATCHES ('Close ticket' ~> 'Open Ticket')";
inline const char* kClosedBlockedQuery =
    "SELECT case_id FROM THIS_PROCESS WHERE (event_name = 'Close ticket' AND \"status\" = 'blocked')";
inline const char* kBlockedReopenedQuery =
    "SELECT case_id FROM THIS_PROCESS WHERE BEHAVIOUR (event_name = 'Close ticket' AND \"status\" = 'blocked') "
    "as closed_while_blocked MATCHES(closed_while_blocked ~> 'Open ticket')";
inline const char* kCycleTimeQuery = "SELECT AVG((SELECT LAST(end_time) - FIRST(end_time))) FROM THIS_PROCESS";

}  // namespace signaldb::testing
