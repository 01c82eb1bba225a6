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

#include "signaldb/store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <numeric>

#include <fmt/format.h>

namespace signaldb::store {

std::string_view level_name(Level level) { return level == Level::Case ? "case" : "event"; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<Attribute> case_attributes, std::vector<Attribute> event_attributes)
    : case_attributes_(std::move(case_attributes)), event_attributes_(std::move(event_attributes)) {}

Schema Schema::with_required(std::vector<Attribute> extra_case, std::vector<Attribute> extra_event,
                             bool with_start_time) {
  std::vector<Attribute> cases{{std::string(kCaseId), ScalarType::String}};
  cases.insert(cases.end(), extra_case.begin(), extra_case.end());
  std::vector<Attribute> events{{std::string(kEventName), ScalarType::String},
                                {std::string(kEndTime), ScalarType::Timestamp}};
  if (with_start_time) events.push_back({std::string(kStartTime), ScalarType::Timestamp});
  events.insert(events.end(), extra_event.begin(), extra_event.end());
  return Schema(std::move(cases), std::move(events));
}

namespace {

void require_attribute(const Schema& schema, Level level, std::string_view name, ScalarType type,
                       bool optional) {
  auto idx = schema.find(level, name);
  if (!idx) {
    if (optional) return;
    throw Error(ErrorCode::InvalidSchema,
                fmt::format("schema is missing required {} attribute '{}'", level_name(level), name));
  }
  const auto& attr = schema.attributes(level)[*idx];
  if (attr.type != type) {
    throw Error(ErrorCode::InvalidSchema, fmt::format("required attribute '{}' must have type {}, not {}", name,
                                                      type_name(type), type_name(attr.type)));
  }
}

void check_unique(const std::vector<Attribute>& attrs, Level level) {
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name.empty()) throw Error(ErrorCode::InvalidSchema, "attribute names must not be empty");
    for (std::size_t j = i + 1; j < attrs.size(); ++j) {
      if (iequals(attrs[i].name, attrs[j].name)) {
        throw Error(ErrorCode::InvalidSchema,
                    fmt::format("duplicate {} attribute '{}'", level_name(level), attrs[j].name));
      }
    }
  }
}

}  // namespace

void Schema::validate() const {
  check_unique(case_attributes_, Level::Case);
  check_unique(event_attributes_, Level::Event);
  require_attribute(*this, Level::Case, kCaseId, ScalarType::String, false);
  require_attribute(*this, Level::Event, kEventName, ScalarType::String, false);
  require_attribute(*this, Level::Event, kEndTime, ScalarType::Timestamp, false);
  require_attribute(*this, Level::Event, kStartTime, ScalarType::Timestamp, true);
}

std::optional<std::size_t> Schema::find(Level level, std::string_view name) const {
  const auto& attrs = attributes(level);
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (iequals(attrs[i].name, name)) return i;
  }
  return std::nullopt;
}

std::size_t Schema::require(Level level, std::string_view name) const {
  if (auto idx = find(level, name)) return *idx;
  throw Error(ErrorCode::UnknownColumn, fmt::format("unknown {} column '{}'", level_name(level), name));
}

// ---------------------------------------------------------------------------
// Columns

std::int64_t StringDictionary::intern(std::string_view s) {
  auto it = index_.find(std::string(s));
  if (it != index_.end()) return it->second;
  auto code = static_cast<std::int64_t>(values_.size());
  values_.emplace_back(s);
  index_.emplace(values_.back(), code);
  return code;
}

std::optional<std::int64_t> StringDictionary::find(std::string_view s) const {
  auto it = index_.find(std::string(s));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Column::reserve(std::size_t n) {
  valid_.reserve(n);
  if (type_ == ScalarType::Number) {
    numbers_.reserve(n);
  } else {
    ints_.reserve(n);
  }
}

void Column::append(const Value& v) {
  if (v.is_null()) {
    valid_.push_back(0);
    if (type_ == ScalarType::Number) {
      numbers_.push_back(0.0);
    } else {
      ints_.push_back(0);
    }
    return;
  }
  if (v.type() != type_) {
    throw Error(ErrorCode::TypeMismatch,
                fmt::format("expected a {} value, got {}", type_name(type_), type_name(v.type())));
  }
  switch (type_) {
    case ScalarType::Boolean: ints_.push_back(v.as_bool() ? 1 : 0); break;
    case ScalarType::Number:
      if (std::isnan(v.as_number())) throw Error(ErrorCode::TypeMismatch, "NaN is not a valid Number");
      numbers_.push_back(v.as_number());
      break;
    case ScalarType::String: ints_.push_back(dict_.intern(v.as_string())); break;
    case ScalarType::Timestamp:
    case ScalarType::Duration: ints_.push_back(v.as_int()); break;
  }
  valid_.push_back(1);
}

Value Column::value_at(std::size_t i) const {
  if (is_null(i)) return Value::null(type_);
  switch (type_) {
    case ScalarType::Boolean: return Value::boolean(ints_[i] != 0);
    case ScalarType::Number: return Value::number(numbers_[i]);
    case ScalarType::String: return Value::string(dict_.at(ints_[i]));
    case ScalarType::Timestamp: return Value::timestamp(ints_[i]);
    case ScalarType::Duration: return Value::duration(ints_[i]);
  }
  return Value::null(type_);
}

// ---------------------------------------------------------------------------
// Snapshot

Snapshot::Snapshot(std::string log_id, Schema schema, std::shared_ptr<const Offsets> offsets,
                   std::map<ColumnId, ColumnRef> columns)
    : log_id_(std::move(log_id)),
      schema_(std::move(schema)),
      offsets_(std::move(offsets)),
      columns_(std::move(columns)) {}

const Column& Snapshot::column(ColumnId id) const { return *column_ref(id); }

ColumnRef Snapshot::column_ref(ColumnId id) const {
  auto it = columns_.find(id);
  if (it == columns_.end()) {
    const auto& attrs = schema_.attributes(id.level);
    std::string name = id.index < attrs.size() ? attrs[id.index].name : std::to_string(id.index);
    throw Error(ErrorCode::SnapshotColumnMissing,
                fmt::format("{} column '{}' is not part of the snapshot", level_name(id.level), name));
  }
  return it->second;
}

std::vector<ColumnId> Snapshot::column_ids() const {
  std::vector<ColumnId> ids;
  for (const auto& [id, _] : columns_) ids.push_back(id);
  return ids;
}

// ---------------------------------------------------------------------------
// EventLog

EventLog::EventLog(std::string log_id, Schema schema)
    : log_id_(std::move(log_id)), schema_(std::move(schema)), offsets_(std::make_shared<Offsets>(Offsets{0})) {
  schema_.validate();
  for (const auto& a : schema_.case_attributes()) case_columns_.push_back(std::make_shared<Column>(a.type));
  for (const auto& a : schema_.event_attributes()) event_columns_.push_back(std::make_shared<Column>(a.type));
}

std::size_t EventLog::case_count() const {
  std::shared_lock lock(mutex_);
  return offsets_->size() - 1;
}

std::size_t EventLog::event_count() const {
  std::shared_lock lock(mutex_);
  return offsets_->back();
}

Column& EventLog::writable(std::shared_ptr<Column>& col) {
  // A snapshot still holds this column: copy before writing.
  if (col.use_count() > 1) col = std::make_shared<Column>(*col);
  return *col;
}

namespace {

// Resolves user-supplied keys against one schema level; returns values in
// attribute order with NULL for absent optional attributes.
std::vector<Value> resolve_row(const Schema& schema, Level level, const ValueMap& values) {
  const auto& attrs = schema.attributes(level);
  std::vector<Value> row;
  row.reserve(attrs.size());
  for (const auto& a : attrs) row.push_back(Value::null(a.type));
  for (const auto& [name, value] : values) {
    auto idx = schema.find(level, name);
    if (!idx) throw Error(ErrorCode::UnknownColumn, fmt::format("unknown {} column '{}'", level_name(level), name));
    const auto& attr = attrs[*idx];
    if (!value.is_null() && value.type() != attr.type) {
      throw Error(ErrorCode::TypeMismatch, fmt::format("{} attribute '{}' expects {}, got {}", level_name(level),
                                                       attr.name, type_name(attr.type), type_name(value.type())));
    }
    if (value.type() == ScalarType::Number && !value.is_null() && std::isnan(value.as_number())) {
      throw Error(ErrorCode::TypeMismatch, fmt::format("attribute '{}' is NaN", attr.name));
    }
    row[*idx] = value.is_null() ? Value::null(attr.type) : value;
  }
  return row;
}

void require_present(const std::vector<Value>& row, std::size_t idx, std::string_view name) {
  if (row[idx].is_null()) {
    throw Error(ErrorCode::MissingRequiredField, fmt::format("required field '{}' is missing", name));
  }
}

}  // namespace

std::size_t EventLog::append_case(const ValueMap& case_values, const std::vector<ValueMap>& events) {
  if (events.empty()) throw Error(ErrorCode::EmptyCase, "a case must contain at least one event");

  // Validate everything before touching storage so a failed append leaves the
  // log unchanged.
  auto case_row = resolve_row(schema_, Level::Case, case_values);
  require_present(case_row, schema_.case_id_index(), Schema::kCaseId);

  std::vector<std::vector<Value>> event_rows;
  event_rows.reserve(events.size());
  const auto name_idx = schema_.event_name_index();
  const auto end_idx = schema_.end_time_index();
  for (const auto& e : events) {
    event_rows.push_back(resolve_row(schema_, Level::Event, e));
    require_present(event_rows.back(), name_idx, Schema::kEventName);
    require_present(event_rows.back(), end_idx, Schema::kEndTime);
  }

  std::vector<std::size_t> order(event_rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return event_rows[a][end_idx].as_int() < event_rows[b][end_idx].as_int();
  });

  std::unique_lock lock(mutex_);
  const auto& case_id = case_row[schema_.case_id_index()].as_string();
  if (case_ids_.contains(case_id)) {
    throw Error(ErrorCode::DuplicateCaseId, fmt::format("case_id '{}' already exists in log '{}'", case_id, log_id_));
  }

  for (std::size_t i = 0; i < case_columns_.size(); ++i) writable(case_columns_[i]).append(case_row[i]);
  for (std::size_t i = 0; i < event_columns_.size(); ++i) {
    auto& col = writable(event_columns_[i]);
    for (auto pos : order) col.append(event_rows[pos][i]);
  }
  if (offsets_.use_count() > 1) offsets_ = std::make_shared<Offsets>(*offsets_);
  offsets_->push_back(offsets_->back() + event_rows.size());
  case_ids_.insert(case_id);
  return offsets_->size() - 2;
}

std::shared_ptr<const Snapshot> EventLog::snapshot(const std::vector<ColumnId>& columns) const {
  std::shared_lock lock(mutex_);
  std::map<ColumnId, ColumnRef> picked;
  for (const auto& id : columns) {
    const auto& cols = id.level == Level::Case ? case_columns_ : event_columns_;
    if (id.index >= cols.size()) {
      throw Error(ErrorCode::UnknownColumn,
                  fmt::format("unknown {} column #{}", level_name(id.level), id.index));
    }
    picked.emplace(id, cols[id.index]);
  }
  return std::make_shared<Snapshot>(log_id_, schema_, offsets_, std::move(picked));
}

std::shared_ptr<const Snapshot> EventLog::snapshot(const std::vector<std::pair<Level, std::string>>& columns) const {
  std::vector<ColumnId> ids;
  for (const auto& [level, name] : columns) ids.push_back({level, schema_.require(level, name)});
  return snapshot(ids);
}

std::shared_ptr<const Snapshot> EventLog::snapshot_all() const {
  std::vector<ColumnId> ids;
  for (std::size_t i = 0; i < schema_.case_attributes().size(); ++i) ids.push_back({Level::Case, i});
  for (std::size_t i = 0; i < schema_.event_attributes().size(); ++i) ids.push_back({Level::Event, i});
  return snapshot(ids);
}

// ---------------------------------------------------------------------------
// Catalog

EventLogPtr Catalog::create_log(const std::string& log_id, const Schema& schema) {
  schema.validate();
  auto log = std::make_shared<EventLog>(log_id, schema);
  add(log);
  return log;
}

void Catalog::add(EventLogPtr log) {
  std::unique_lock lock(mutex_);
  if (log->log_id().empty()) throw Error(ErrorCode::InvalidSchema, "log id must not be empty");
  if (logs_.contains(log->log_id())) {
    throw Error(ErrorCode::DuplicateLogId, fmt::format("log '{}' already exists", log->log_id()));
  }
  logs_.emplace(log->log_id(), std::move(log));
}

EventLogPtr Catalog::get(const std::string& log_id) const {
  if (auto log = find(log_id)) return log;
  throw Error(ErrorCode::UnknownLog, fmt::format("unknown log '{}'", log_id));
}

EventLogPtr Catalog::find(const std::string& log_id) const {
  std::shared_lock lock(mutex_);
  auto it = logs_.find(log_id);
  return it == logs_.end() ? nullptr : it->second;
}

bool Catalog::remove(const std::string& log_id) {
  std::unique_lock lock(mutex_);
  return logs_.erase(log_id) > 0;
}

std::vector<EventLogPtr> Catalog::list() const {
  std::shared_lock lock(mutex_);
  std::vector<EventLogPtr> out;
  for (const auto& [_, log] : logs_) out.push_back(log);
  return out;
}

// ---------------------------------------------------------------------------
// flatten

ResultTable flatten(const Snapshot& snapshot) {
  const auto& schema = snapshot.schema();
  const std::size_t n_cases = snapshot.case_count();
  const std::size_t n_events = snapshot.event_count();
  ResultTable out;

  for (std::size_t a = 0; a < schema.case_attributes().size(); ++a) {
    const auto& col = snapshot.column({Level::Case, a});
    ResultColumn rc{schema.case_attributes()[a].name, col.type(), {}};
    rc.cells.reserve(n_events);
    for (std::size_t c = 0; c < n_cases; ++c) {
      Value v = col.value_at(c);
      for (auto e = snapshot.case_begin(c); e < snapshot.case_end(c); ++e) rc.cells.push_back(v);
    }
    out.columns.push_back(std::move(rc));
  }
  for (std::size_t a = 0; a < schema.event_attributes().size(); ++a) {
    const auto& col = snapshot.column({Level::Event, a});
    ResultColumn rc{schema.event_attributes()[a].name, col.type(), {}};
    rc.cells.reserve(n_events);
    for (std::size_t e = 0; e < n_events; ++e) rc.cells.push_back(col.value_at(e));
    out.columns.push_back(std::move(rc));
  }
  out.rows_without_columns = n_events;
  return out;
}

ResultTable flatten(const EventLog& log) { return flatten(*log.snapshot_all()); }

}  // namespace signaldb::store
