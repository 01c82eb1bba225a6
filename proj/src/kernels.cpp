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

#include "signaldb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

namespace signaldb::exec {

using analyzer::AggKind;
using analyzer::BoundOp;

namespace {

bool uses_ints(ScalarType t) { return t == ScalarType::Boolean || is_temporal(t); }

std::size_t broadcast_size(const Vec& a, const Vec& b) {
  if (a.size() == 1) return b.size();
  if (b.size() == 1) return a.size();
  if (a.size() != b.size()) throw Error(ErrorCode::Internal, "vector length mismatch");
  return a.size();
}

inline std::size_t at(const Vec& v, std::size_t i) { return v.size() == 1 ? 0 : i; }

int compare_cells(const Vec& a, std::size_t i, const Vec& b, std::size_t j) {
  switch (a.type) {
    case ScalarType::Number: return a.nums[i] < b.nums[j] ? -1 : (a.nums[i] > b.nums[j] ? 1 : 0);
    case ScalarType::String: {
      int c = a.strs[i].compare(b.strs[j]);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    default: return a.ints[i] < b.ints[j] ? -1 : (a.ints[i] > b.ints[j] ? 1 : 0);
  }
}

void encode_cell(const Vec& v, std::size_t i, std::string& out) {
  if (v.is_null(i)) {
    out.push_back('\0');
    return;
  }
  out.push_back('\1');
  auto append = [&](const void* p, std::size_t n) { out.append(static_cast<const char*>(p), n); };
  switch (v.type) {
    case ScalarType::Number: {
      double d = v.nums[i] == 0.0 ? 0.0 : v.nums[i];
      append(&d, sizeof d);
      break;
    }
    case ScalarType::String: {
      std::uint64_t n = v.strs[i].size();
      append(&n, sizeof n);
      out += v.strs[i];
      break;
    }
    default: append(&v.ints[i], sizeof(std::int64_t)); break;
  }
}

[[noreturn]] void overflow(std::string_view what) {
  throw Error(ErrorCode::EvaluationError, fmt::format("arithmetic overflow in {}", what));
}

}  // namespace

KernelStats& kernel_stats() {
  static KernelStats stats;
  return stats;
}

// ---------------------------------------------------------------------------
// Vec

Vec::Vec(ScalarType t, std::size_t n) : type(t), valid(n, 1) {
  if (uses_ints(t)) ints.resize(n);
  else if (t == ScalarType::Number) nums.resize(n);
  else strs.resize(n);
}

Value Vec::get(std::size_t i) const {
  if (is_null(i)) return Value::null(type);
  switch (type) {
    case ScalarType::Boolean: return Value::boolean(ints[i] != 0);
    case ScalarType::Number: return Value::number(nums[i]);
    case ScalarType::String: return Value::string(strs[i]);
    case ScalarType::Timestamp: return Value::timestamp(ints[i]);
    case ScalarType::Duration: return Value::duration(ints[i]);
  }
  return Value::null(type);
}

void Vec::set(std::size_t i, const Value& v) {
  if (v.is_null()) {
    valid[i] = 0;
    return;
  }
  valid[i] = 1;
  switch (type) {
    case ScalarType::Boolean: ints[i] = v.as_bool() ? 1 : 0; break;
    case ScalarType::Number: nums[i] = v.as_number(); break;
    case ScalarType::String: strs[i] = v.as_string(); break;
    default: ints[i] = v.as_int(); break;
  }
}

Vec Vec::constant(const Value& v) {
  Vec out(v.type(), 1);
  out.set(0, v);
  return out;
}

Vec Vec::gather(const store::Column& col, std::span<const std::uint32_t> index) {
  Vec out(col.type(), index.size());
  auto validity = col.validity();
  for (std::size_t i = 0; i < index.size(); ++i) out.valid[i] = validity[index[i]];
  if (uses_ints(col.type())) {
    auto src = col.ints();
    for (std::size_t i = 0; i < index.size(); ++i) out.ints[i] = src[index[i]];
  } else if (col.type() == ScalarType::Number) {
    auto src = col.numbers();
    for (std::size_t i = 0; i < index.size(); ++i) out.nums[i] = src[index[i]];
  } else {
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (out.valid[i]) out.strs[i] = col.string_at(index[i]);
    }
  }
  return out;
}

Vec Vec::take(std::span<const std::uint32_t> index) const {
  Vec out(type, index.size());
  for (std::size_t i = 0; i < index.size(); ++i) out.valid[i] = valid[index[i]];
  if (uses_ints(type)) {
    for (std::size_t i = 0; i < index.size(); ++i) out.ints[i] = ints[index[i]];
  } else if (type == ScalarType::Number) {
    for (std::size_t i = 0; i < index.size(); ++i) out.nums[i] = nums[index[i]];
  } else {
    for (std::size_t i = 0; i < index.size(); ++i) out.strs[i] = strs[index[i]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Element-wise kernels

Vec vector_compare(const Vec& a, BoundOp op, const Vec& b) {
  const std::size_t n = broadcast_size(a, b);
  Vec out(ScalarType::Boolean, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ia = at(a, i), ib = at(b, i);
    if (a.is_null(ia) || b.is_null(ib)) {
      out.valid[i] = 0;
      continue;
    }
    bool r = false;
    if (op == BoundOp::EqIgnoreCase) {
      r = store::iequals(a.strs[ia], b.strs[ib]);
    } else {
      int c = compare_cells(a, ia, b, ib);
      switch (op) {
        case BoundOp::Eq: r = c == 0; break;
        case BoundOp::Ne: r = c != 0; break;
        case BoundOp::Lt: r = c < 0; break;
        case BoundOp::Le: r = c <= 0; break;
        case BoundOp::Gt: r = c > 0; break;
        case BoundOp::Ge: r = c >= 0; break;
        default: throw Error(ErrorCode::Internal, "not a comparison operator");
      }
    }
    out.ints[i] = r ? 1 : 0;
  }
  return out;
}

Vec vector_arith(const Vec& a, BoundOp op, const Vec& b, ScalarType result) {
  const std::size_t n = broadcast_size(a, b);
  Vec out(result, n);
  const bool numeric = result == ScalarType::Number;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ia = at(a, i), ib = at(b, i);
    if (a.is_null(ia) || b.is_null(ib)) {
      out.valid[i] = 0;
      continue;
    }
    if (numeric) {
      double x = a.nums[ia], y = b.nums[ib], r = 0;
      switch (op) {
        case BoundOp::Add: r = x + y; break;
        case BoundOp::Sub: r = x - y; break;
        case BoundOp::Mul: r = x * y; break;
        case BoundOp::Div:
          if (y == 0) {
            out.valid[i] = 0;
            continue;
          }
          r = x / y;
          break;
        default: throw Error(ErrorCode::Internal, "not an arithmetic operator");
      }
      if (!std::isfinite(r)) overflow(analyzer::op_text(op));
      out.nums[i] = r;
    } else {
      std::int64_t x = a.ints[ia], y = b.ints[ib], r = 0;
      bool bad = false;
      switch (op) {
        case BoundOp::Add: bad = __builtin_add_overflow(x, y, &r); break;
        case BoundOp::Sub: bad = __builtin_sub_overflow(x, y, &r); break;
        default: throw Error(ErrorCode::Internal, "unsupported temporal arithmetic");
      }
      if (bad) overflow(analyzer::op_text(op));
      out.ints[i] = r;
    }
  }
  return out;
}

Vec vector_logic(const Vec& a, BoundOp op, const Vec& b) {
  const std::size_t n = broadcast_size(a, b);
  Vec out(ScalarType::Boolean, n);
  const bool is_and = op == BoundOp::And;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ia = at(a, i), ib = at(b, i);
    const bool na = a.is_null(ia), nb = b.is_null(ib);
    const bool va = !na && a.ints[ia] != 0, vb = !nb && b.ints[ib] != 0;
    if (is_and) {
      if ((!na && !va) || (!nb && !vb)) out.ints[i] = 0;
      else if (na || nb) out.valid[i] = 0;
      else out.ints[i] = 1;
    } else {
      if (va || vb) out.ints[i] = 1;
      else if (na || nb) out.valid[i] = 0;
      else out.ints[i] = 0;
    }
  }
  return out;
}

Vec vector_not(const Vec& a) {
  Vec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.ints[i] = out.ints[i] ? 0 : 1;
  return out;
}

std::vector<std::uint32_t> vector_filter(const Vec& predicate) {
  std::vector<std::uint32_t> rows;
  for (std::size_t i = 0; i < predicate.size(); ++i) {
    if (predicate.valid[i] && predicate.ints[i]) rows.push_back(static_cast<std::uint32_t>(i));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Relational kernels

Groups hash_group(std::span<const Vec* const> keys, std::size_t rows) {
  Groups g;
  g.group_of_row.resize(rows);
  if (keys.empty()) {
    g.first_row.push_back(0);
    return g;
  }
  std::unordered_map<std::string, std::uint32_t> index;
  std::string key;
  for (std::size_t r = 0; r < rows; ++r) {
    key.clear();
    for (const Vec* k : keys) encode_cell(*k, at(*k, r), key);
    auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(g.first_row.size()));
    if (inserted) g.first_row.push_back(static_cast<std::uint32_t>(r));
    g.group_of_row[r] = it->second;
  }
  return g;
}

std::vector<std::uint32_t> sort_rows(std::span<const Vec* const> keys, const std::vector<bool>& descending,
                                     std::size_t rows) {
  kernel_stats().sorts.fetch_add(1, std::memory_order_relaxed);
  std::vector<std::uint32_t> order(rows);
  for (std::size_t i = 0; i < rows; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const Vec& v = *keys[k];
      const std::size_t ix = at(v, x), iy = at(v, y);
      const bool nx = v.is_null(ix), ny = v.is_null(iy);
      int c = 0;
      if (nx || ny) c = nx == ny ? 0 : (nx ? -1 : 1);
      else c = compare_cells(v, ix, v, iy);
      if (descending[k]) c = -c;
      if (c != 0) return c < 0;
    }
    return false;
  });
  return order;
}

std::vector<std::uint32_t> limit(std::vector<std::uint32_t> rows, std::int64_t k) {
  if (k < 0) k = 0;
  if (rows.size() > static_cast<std::size_t>(k)) rows.resize(static_cast<std::size_t>(k));
  return rows;
}

Vec first_last_positional(const store::Column& col, std::span<const std::uint64_t> offsets,
                          std::span<const std::uint32_t> cases, bool last) {
  kernel_stats().positional_reads.fetch_add(1, std::memory_order_relaxed);
  std::vector<std::uint32_t> events(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    events[i] = static_cast<std::uint32_t>(last ? offsets[cases[i] + 1] - 1 : offsets[cases[i]]);
  }
  return Vec::gather(col, events);
}

Vec first_last_naive(const store::Column& col, const store::Column& end_time,
                     std::span<const std::uint64_t> offsets, std::span<const std::uint32_t> cases, bool last) {
  auto times = end_time.ints();
  std::vector<std::uint32_t> events(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::uint64_t best = offsets[cases[i]];
    for (auto e = offsets[cases[i]] + 1; e < offsets[cases[i] + 1]; ++e) {
      if (last ? times[e] >= times[best] : times[e] < times[best]) best = e;
    }
    events[i] = static_cast<std::uint32_t>(best);
  }
  return Vec::gather(col, events);
}

Vec accumulate(const analyzer::AggCall& agg, const Vec* arg, std::span<const std::uint32_t> group_of_row,
               std::size_t groups, const std::vector<std::uint8_t>* mask) {
  const std::size_t rows = group_of_row.size();
  auto skip = [&](std::size_t r) { return mask && !(*mask)[r]; };
  Vec out(agg.type, groups);

  if (agg.kind == AggKind::CountStar) {
    std::fill(out.nums.begin(), out.nums.end(), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!skip(r)) out.nums[group_of_row[r]] += 1;
    }
    return out;
  }

  const Vec& v = *arg;
  // Distinct aggregates see each value once per group.
  std::vector<std::unordered_set<std::string>> seen(agg.distinct ? groups : 0);
  std::string key;
  auto admit = [&](std::size_t r) {
    if (skip(r)) return false;
    if (agg.kind == AggKind::First || agg.kind == AggKind::Last) return true;
    if (v.is_null(at(v, r))) return false;
    if (!agg.distinct) return true;
    key.clear();
    encode_cell(v, at(v, r), key);
    return seen[group_of_row[r]].insert(key).second;
  };

  switch (agg.kind) {
    case AggKind::Count: {
      std::fill(out.nums.begin(), out.nums.end(), 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        if (admit(r)) out.nums[group_of_row[r]] += 1;
      }
      return out;
    }
    case AggKind::Sum:
    case AggKind::Avg: {
      std::vector<std::uint64_t> count(groups, 0);
      if (v.type == ScalarType::Number) {
        std::vector<double> sum(groups, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
          if (!admit(r)) continue;
          sum[group_of_row[r]] += v.nums[at(v, r)];
          ++count[group_of_row[r]];
        }
        for (std::size_t g = 0; g < groups; ++g) {
          if (count[g] == 0) {
            out.valid[g] = 0;
            continue;
          }
          double r = agg.kind == AggKind::Sum ? sum[g] : sum[g] / static_cast<double>(count[g]);
          if (!std::isfinite(r)) overflow(analyzer::agg_name(agg.kind));
          out.nums[g] = r;
        }
      } else {
        std::vector<__int128> sum(groups, 0);
        for (std::size_t r = 0; r < rows; ++r) {
          if (!admit(r)) continue;
          sum[group_of_row[r]] += v.ints[at(v, r)];
          ++count[group_of_row[r]];
        }
        for (std::size_t g = 0; g < groups; ++g) {
          if (count[g] == 0) {
            out.valid[g] = 0;
            continue;
          }
          __int128 r = sum[g];
          if (agg.kind == AggKind::Avg) {
            // Round half away from zero.
            const __int128 c = static_cast<__int128>(count[g]);
            __int128 q = r / c, rem = r % c;
            if (2 * (rem < 0 ? -rem : rem) >= c) q += r < 0 ? -1 : 1;
            r = q;
          }
          if (r > INT64_MAX || r < INT64_MIN) overflow(analyzer::agg_name(agg.kind));
          out.ints[g] = static_cast<std::int64_t>(r);
        }
      }
      return out;
    }
    case AggKind::Min:
    case AggKind::Max: {
      std::vector<std::int64_t> best(groups, -1);
      const bool want_max = agg.kind == AggKind::Max;
      for (std::size_t r = 0; r < rows; ++r) {
        if (!admit(r)) continue;
        auto& b = best[group_of_row[r]];
        if (b < 0) {
          b = static_cast<std::int64_t>(r);
          continue;
        }
        int c = compare_cells(v, at(v, r), v, at(v, static_cast<std::size_t>(b)));
        if (want_max ? c > 0 : c < 0) b = static_cast<std::int64_t>(r);
      }
      for (std::size_t g = 0; g < groups; ++g) {
        if (best[g] < 0) out.valid[g] = 0;
        else out.set(g, v.get(at(v, static_cast<std::size_t>(best[g]))));
      }
      return out;
    }
    case AggKind::First:
    case AggKind::Last: {
      std::vector<std::int64_t> pick(groups, -1);
      const bool last = agg.kind == AggKind::Last;
      for (std::size_t r = 0; r < rows; ++r) {
        if (!admit(r)) continue;
        auto& p = pick[group_of_row[r]];
        if (p < 0 || last) p = static_cast<std::int64_t>(r);
      }
      for (std::size_t g = 0; g < groups; ++g) {
        if (pick[g] < 0) out.valid[g] = 0;
        else out.set(g, v.get(at(v, static_cast<std::size_t>(pick[g]))));
      }
      return out;
    }
    case AggKind::CountStar: break;
  }
  return out;
}

}  // namespace signaldb::exec
