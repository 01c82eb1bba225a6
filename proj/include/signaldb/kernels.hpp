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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "signaldb/bound_expr.hpp"
#include "signaldb/store.hpp"
#include "signaldb/value.hpp"

namespace signaldb::exec {

/// A column of intermediate values. Boolean, Timestamp and Duration live in
/// `ints`, Number in `nums`, String in `strs`. A vector of size 1 broadcasts
/// against any other length.
struct Vec {
  ScalarType type = ScalarType::Boolean;
  std::vector<std::uint8_t> valid;
  std::vector<std::int64_t> ints;
  std::vector<double> nums;
  std::vector<std::string> strs;

  Vec() = default;
  Vec(ScalarType t, std::size_t n);

  std::size_t size() const { return valid.size(); }
  bool is_null(std::size_t i) const { return valid[i] == 0; }
  Value get(std::size_t i) const;
  void set(std::size_t i, const Value& v);
  void set_null(std::size_t i) { valid[i] = 0; }

  static Vec constant(const Value& v);
  /// Gathers rows `index` of a stored column.
  static Vec gather(const store::Column& col, std::span<const std::uint32_t> index);
  /// Rows `index` of this vector.
  Vec take(std::span<const std::uint32_t> index) const;
};

struct KernelStats {
  std::atomic<std::uint64_t> sorts{0};           // sort_rows invocations
  std::atomic<std::uint64_t> positional_reads{0};  // first_last_positional invocations
};

KernelStats& kernel_stats();

/// Three-valued comparison; the result is a Boolean vector.
Vec vector_compare(const Vec& a, analyzer::BoundOp op, const Vec& b);

/// +, -, *, / over Number, Timestamp and Duration per the type rules.
/// Division by zero yields NULL; integer overflow or a non-finite result
/// raises EvaluationError.
Vec vector_arith(const Vec& a, analyzer::BoundOp op, const Vec& b, ScalarType result);

/// Three-valued AND / OR / NOT.
Vec vector_logic(const Vec& a, analyzer::BoundOp op, const Vec& b);
Vec vector_not(const Vec& a);

/// Indices of rows whose predicate is true (NULL and false are dropped).
std::vector<std::uint32_t> vector_filter(const Vec& predicate);

struct Groups {
  std::vector<std::uint32_t> group_of_row;
  std::vector<std::uint32_t> first_row;  // groups in order of first appearance

  std::size_t count() const { return first_row.size(); }
};

/// Groups rows by equal key tuples; NULL keys form their own group.
Groups hash_group(std::span<const Vec* const> keys, std::size_t rows);

/// Stable sort of row indices; NULLs sort first ascending, last descending.
std::vector<std::uint32_t> sort_rows(std::span<const Vec* const> keys, const std::vector<bool>& descending,
                                     std::size_t rows);

/// The first `k` entries of `rows`.
std::vector<std::uint32_t> limit(std::vector<std::uint32_t> rows, std::int64_t k);

/// Value of `col` at the first (or last) event of each case, read directly
/// from the case offsets.
Vec first_last_positional(const store::Column& col, std::span<const std::uint64_t> offsets,
                          std::span<const std::uint32_t> cases, bool last);

/// Reference for first_last_positional: scans each case for the event with
/// the smallest (largest) end time; among equal end times the stored order
/// decides.
Vec first_last_naive(const store::Column& col, const store::Column& end_time,
                     std::span<const std::uint64_t> offsets, std::span<const std::uint32_t> cases, bool last);

/// Folds `arg` (absent for COUNT(*)) into one value per group. Rows are
/// visited in order, so FIRST/LAST pick the earliest/latest row of each
/// group; `mask`, when given, excludes rows.
Vec accumulate(const analyzer::AggCall& agg, const Vec* arg, std::span<const std::uint32_t> group_of_row,
               std::size_t groups, const std::vector<std::uint8_t>* mask = nullptr);

}  // namespace signaldb::exec
