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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "signaldb/error.hpp"
#include "signaldb/result_table.hpp"
#include "signaldb/value.hpp"

namespace signaldb::store {

enum class Level { Case, Event };

std::string_view level_name(Level level);

struct Attribute {
  std::string name;
  ScalarType type = ScalarType::String;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Case- and event-level attribute declarations. Names compare
/// case-insensitively; the declared spelling is preserved.
class Schema {
 public:
  static constexpr std::string_view kCaseId = "case_id";
  static constexpr std::string_view kEventName = "event_name";
  static constexpr std::string_view kEndTime = "end_time";
  static constexpr std::string_view kStartTime = "start_time";

  Schema() = default;
  Schema(std::vector<Attribute> case_attributes, std::vector<Attribute> event_attributes);

  /// Schema with only the required columns plus the given extras.
  static Schema with_required(std::vector<Attribute> extra_case, std::vector<Attribute> extra_event,
                              bool with_start_time = false);

  /// Throws InvalidSchema when a required column is missing, mistyped, or a
  /// name is duplicated within its level.
  void validate() const;

  const std::vector<Attribute>& attributes(Level level) const {
    return level == Level::Case ? case_attributes_ : event_attributes_;
  }
  const std::vector<Attribute>& case_attributes() const { return case_attributes_; }
  const std::vector<Attribute>& event_attributes() const { return event_attributes_; }

  std::optional<std::size_t> find(Level level, std::string_view name) const;
  std::size_t require(Level level, std::string_view name) const;

  std::size_t case_id_index() const { return *find(Level::Case, kCaseId); }
  std::size_t event_name_index() const { return *find(Level::Event, kEventName); }
  std::size_t end_time_index() const { return *find(Level::Event, kEndTime); }
  std::optional<std::size_t> start_time_index() const { return find(Level::Event, kStartTime); }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Attribute> case_attributes_;
  std::vector<Attribute> event_attributes_;
};

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);

/// Distinct-string table for dictionary-encoded string columns.
class StringDictionary {
 public:
  std::int64_t intern(std::string_view s);
  std::optional<std::int64_t> find(std::string_view s) const;
  const std::string& at(std::int64_t code) const { return values_[static_cast<std::size_t>(code)]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::int64_t> index_;
};

/// One typed column with a validity mask.
///
/// Physical layout: Number uses `numbers()`; every other type uses `ints()`
/// (Boolean as 0/1, Timestamp/Duration as milliseconds, String as dictionary
/// codes).
class Column {
 public:
  explicit Column(ScalarType type) : type_(type) {}

  ScalarType type() const { return type_; }
  std::size_t size() const { return valid_.size(); }
  bool is_null(std::size_t i) const { return valid_[i] == 0; }

  /// Throws TypeMismatch when `v` is not NULL and has a different type.
  void append(const Value& v);
  void reserve(std::size_t n);

  Value value_at(std::size_t i) const;
  const std::string& string_at(std::size_t i) const { return dict_.at(ints_[i]); }

  std::span<const std::uint8_t> validity() const { return valid_; }
  std::span<const std::int64_t> ints() const { return ints_; }
  std::span<const double> numbers() const { return numbers_; }
  const StringDictionary& dictionary() const { return dict_; }

 private:
  ScalarType type_;
  std::vector<std::uint8_t> valid_;
  std::vector<std::int64_t> ints_;
  std::vector<double> numbers_;
  StringDictionary dict_;
};

using ColumnRef = std::shared_ptr<const Column>;
using Offsets = std::vector<std::uint64_t>;

struct ColumnId {
  Level level = Level::Case;
  std::size_t index = 0;

  friend auto operator<=>(const ColumnId&, const ColumnId&) = default;
};

/// Immutable view over a subset of a log's columns plus the case offsets.
/// Later appends to the log are never visible through it.
class Snapshot {
 public:
  Snapshot(std::string log_id, Schema schema, std::shared_ptr<const Offsets> offsets,
           std::map<ColumnId, ColumnRef> columns);

  const std::string& log_id() const { return log_id_; }
  const Schema& schema() const { return schema_; }
  std::size_t case_count() const { return offsets_->size() - 1; }
  std::size_t event_count() const { return offsets_->back(); }
  std::span<const std::uint64_t> offsets() const { return *offsets_; }
  std::uint64_t case_begin(std::size_t c) const { return (*offsets_)[c]; }
  std::uint64_t case_end(std::size_t c) const { return (*offsets_)[c + 1]; }

  bool has_column(ColumnId id) const { return columns_.contains(id); }
  /// Throws SnapshotColumnMissing when the column was not captured.
  const Column& column(ColumnId id) const;
  ColumnRef column_ref(ColumnId id) const;
  std::vector<ColumnId> column_ids() const;

 private:
  std::string log_id_;
  Schema schema_;
  std::shared_ptr<const Offsets> offsets_;
  std::map<ColumnId, ColumnRef> columns_;
};

using ValueMap = std::map<std::string, Value>;

/// Columnar event log: one row per case, each case owning a contiguous,
/// end_time-ordered range of the event columns.
///
/// Single writer, many readers. Readers work on Snapshots; append_case copies
/// a column before mutating it whenever a snapshot still references it.
class EventLog {
 public:
  EventLog(std::string log_id, Schema schema);

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  const std::string& log_id() const { return log_id_; }
  const Schema& schema() const { return schema_; }
  std::size_t case_count() const;
  std::size_t event_count() const;

  /// Appends one case. Events are stably sorted by end_time (ties keep input
  /// order). Returns the new case's index.
  std::size_t append_case(const ValueMap& case_values, const std::vector<ValueMap>& events);

  /// Throws UnknownColumn when a requested column does not exist.
  std::shared_ptr<const Snapshot> snapshot(const std::vector<ColumnId>& columns) const;
  std::shared_ptr<const Snapshot> snapshot(const std::vector<std::pair<Level, std::string>>& columns) const;
  std::shared_ptr<const Snapshot> snapshot_all() const;

 private:
  Column& writable(std::shared_ptr<Column>& col);

  std::string log_id_;
  Schema schema_;
  mutable std::shared_mutex mutex_;
  std::vector<std::shared_ptr<Column>> case_columns_;
  std::vector<std::shared_ptr<Column>> event_columns_;
  std::shared_ptr<Offsets> offsets_;
  std::unordered_set<std::string> case_ids_;
};

using EventLogPtr = std::shared_ptr<EventLog>;

/// In-process registry of logs by id.
class Catalog {
 public:
  /// Throws DuplicateLogId or InvalidSchema.
  EventLogPtr create_log(const std::string& log_id, const Schema& schema);
  /// Registers an already built log. Throws DuplicateLogId.
  void add(EventLogPtr log);
  /// Throws UnknownLog.
  EventLogPtr get(const std::string& log_id) const;
  EventLogPtr find(const std::string& log_id) const;
  bool remove(const std::string& log_id);
  std::vector<EventLogPtr> list() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, EventLogPtr> logs_;
};

/// One row per event: all case attributes (repeated per event) followed by
/// all event attributes, in case order then event order.
ResultTable flatten(const Snapshot& snapshot);
ResultTable flatten(const EventLog& log);

}  // namespace signaldb::store
