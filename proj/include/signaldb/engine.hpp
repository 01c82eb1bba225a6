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
#include <optional>
#include <string>
#include <string_view>

#include "signaldb/analyzer.hpp"
#include "signaldb/executor.hpp"
#include "signaldb/result_table.hpp"
#include "signaldb/store.hpp"

namespace signaldb {

/// Parses, analyzes, plans and runs queries against a catalog. THIS_PROCESS
/// resolves to `current_log`.
class Engine {
 public:
  explicit Engine(std::shared_ptr<store::Catalog> catalog = std::make_shared<store::Catalog>(),
                  exec::ExecOptions options = {});

  store::Catalog& catalog() const { return *catalog_; }
  const std::shared_ptr<store::Catalog>& catalog_ptr() const { return catalog_; }
  const exec::ExecOptions& options() const { return options_; }

  /// Throws NoCurrentProcess, UnknownLog and every parse/analysis error.
  analyzer::LogicalPlan plan(std::string_view query, const std::optional<std::string>& current_log,
                             bool optimize = true) const;
  std::shared_ptr<exec::PhysicalPlan> physical_plan(std::string_view query,
                                                    const std::optional<std::string>& current_log,
                                                    bool optimize = true) const;
  ResultTable query(std::string_view query, const std::optional<std::string>& current_log,
                    bool optimize = true) const;

 private:
  std::pair<analyzer::LogicalPlan, store::EventLogPtr> prepare(std::string_view query,
                                                               const std::optional<std::string>& current_log,
                                                               bool optimize) const;

  std::shared_ptr<store::Catalog> catalog_;
  exec::ExecOptions options_;
};

}  // namespace signaldb
