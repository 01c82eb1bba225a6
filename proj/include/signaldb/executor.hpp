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
#include <optional>
#include <string>
#include <vector>

#include "signaldb/analyzer.hpp"
#include "signaldb/kernels.hpp"
#include "signaldb/pattern.hpp"
#include "signaldb/result_table.hpp"
#include "signaldb/store.hpp"

namespace signaldb::exec {

struct ExecOptions {
  std::size_t max_cells = 50'000'000;  // per-query budget of materialized cells
  std::size_t workers = 0;             // pattern matching threads; 0 picks the hardware concurrency
};

/// Rewrites a plan: case-level filters move below pattern filters and event
/// subqueries, LIMIT moves below projection and into the scan where the
/// pipeline preserves cases one-to-one, unfiltered FIRST/LAST become
/// positional reads, and the scan requests only referenced columns.
analyzer::LogicalPlan optimize(analyzer::LogicalPlan plan);

/// Columns the plan reads; every column when the scan is unpruned.
std::vector<store::ColumnId> required_columns(const analyzer::LogicalPlan& plan);

// Rows flowing between operators. Before aggregation a row is a case (or,
// once flattened, an event); slots hold derived per-row values.
struct Frame {
  std::size_t rows = 0;
  std::vector<std::uint32_t> case_idx;
  std::vector<std::uint32_t> event_idx;  // set for flattened rows
  std::vector<Vec> slots;

  /// Keeps rows `keep`, in that order.
  void select(const std::vector<std::uint32_t>& keep);
};

struct ExecState;

class PhysicalOp {
 public:
  virtual ~PhysicalOp() = default;
  virtual std::string name() const = 0;
  virtual std::string describe() const { return name(); }
  virtual void run(ExecState& state) const = 0;
};

class PhysicalPlan {
 public:
  PhysicalPlan(std::shared_ptr<const store::Snapshot> snapshot, std::vector<std::unique_ptr<PhysicalOp>> ops,
               std::vector<analyzer::OutputColumn> output, std::size_t frame_slots, ExecOptions options);

  const store::Snapshot& snapshot() const { return *snapshot_; }
  const std::vector<std::unique_ptr<PhysicalOp>>& ops() const { return ops_; }
  const std::vector<analyzer::OutputColumn>& output() const { return output_; }
  std::size_t frame_slots() const { return frame_slots_; }
  const ExecOptions& options() const { return options_; }

  std::vector<std::string> op_names() const;
  std::string describe() const;

 private:
  std::shared_ptr<const store::Snapshot> snapshot_;
  std::vector<std::unique_ptr<PhysicalOp>> ops_;
  std::vector<analyzer::OutputColumn> output_;
  std::size_t frame_slots_;
  ExecOptions options_;
};

/// Throws SnapshotColumnMissing when the snapshot lacks a referenced column.
std::shared_ptr<PhysicalPlan> build_physical(const analyzer::LogicalPlan& plan,
                                             std::shared_ptr<const store::Snapshot> snapshot,
                                             ExecOptions options = {});

/// Runs the plan on a dedicated worker thread. Failures come back as
/// signaldb::Error; other exceptions are wrapped as EvaluationError.
ResultTable execute(std::shared_ptr<const PhysicalPlan> plan);

/// Runs the plan on the calling thread.
ResultTable execute_inline(const PhysicalPlan& plan);

/// Evaluates a bound expression over the given rows of a snapshot.
/// `case_idx` and `event_idx` give per-row positions; `event_idx` is empty
/// for case rows.
Vec evaluate(const analyzer::BoundExpr& expr, const store::Snapshot& snapshot, std::size_t rows,
             std::span<const std::uint32_t> case_idx, std::span<const std::uint32_t> event_idx,
             const std::vector<Vec>* slots = nullptr, const std::vector<Vec>* agg_refs = nullptr);

/// Behaviour bits for the events of the given cases (every case when
/// `cases` is null); other events stay unset.
pattern::BehaviourBitmap evaluate_behaviours(std::span<const pattern::Behaviour> behaviours,
                                             const store::Snapshot& snapshot,
                                             const std::vector<std::uint32_t>* cases);

/// Match result per case, fanned out across `workers` threads and gathered
/// in case order.
std::vector<std::uint8_t> match_cases(const pattern::CompiledPattern& compiled, const store::Snapshot& snapshot,
                                      const pattern::BehaviourBitmap& bitmap,
                                      std::span<const std::uint32_t> cases, std::size_t workers);

}  // namespace signaldb::exec
