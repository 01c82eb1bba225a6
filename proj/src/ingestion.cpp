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

#include "signaldb/ingestion.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "signaldb/timestamp.hpp"

namespace signaldb::ingest {

using store::iequals;
using store::Level;

namespace {

std::optional<ColumnRole> parse_role(std::string_view s) {
  if (iequals(s, "case_id")) return ColumnRole::CaseId;
  if (iequals(s, "event_name")) return ColumnRole::EventName;
  if (iequals(s, "end_time")) return ColumnRole::EndTime;
  if (iequals(s, "start_time")) return ColumnRole::StartTime;
  if (iequals(s, "attribute")) return ColumnRole::Attribute;
  return std::nullopt;
}

std::string_view role_name(ColumnRole r) {
  switch (r) {
    case ColumnRole::CaseId: return "case_id";
    case ColumnRole::EventName: return "event_name";
    case ColumnRole::EndTime: return "end_time";
    case ColumnRole::StartTime: return "start_time";
    case ColumnRole::Attribute: return "attribute";
  }
  return "attribute";
}

std::string json_string(const nlohmann::json& j, std::string_view key) {
  if (!j.is_string()) throw Error(ErrorCode::InvalidConfig, fmt::format("'{}' must be a string", key));
  return j.get<std::string>();
}

}  // namespace

CsvIngestConfig CsvIngestConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "ingest config must be a JSON object");
  CsvIngestConfig cfg;
  for (const auto& [key, val] : j.items()) {
    if (key == "delimiter") {
      auto d = json_string(val, key);
      if (d == "\\t" || d == "tab") d = "\t";
      if (d.size() != 1 || d == "\"" || d == "\n" || d == "\r") {
        throw Error(ErrorCode::InvalidConfig, "delimiter must be a single character");
      }
      cfg.delimiter = d[0];
    } else if (key == "timestamp_format") {
      cfg.timestamp_format = json_string(val, key);
    } else if (auto role = parse_role(key); role && *role != ColumnRole::Attribute) {
      cfg.column_roles[json_string(val, key)] = *role;
    } else if (key == "roles") {
      if (!val.is_object()) throw Error(ErrorCode::InvalidConfig, "'roles' must be an object");
      for (const auto& [col, r] : val.items()) {
        auto parsed = parse_role(json_string(r, col));
        if (!parsed) throw Error(ErrorCode::InvalidConfig, fmt::format("unknown role for column '{}'", col));
        cfg.column_roles[col] = *parsed;
      }
    } else if (key == "levels") {
      if (!val.is_object()) throw Error(ErrorCode::InvalidConfig, "'levels' must be an object");
      for (const auto& [col, l] : val.items()) {
        auto s = json_string(l, col);
        if (iequals(s, "case")) {
          cfg.level_overrides[col] = Level::Case;
        } else if (iequals(s, "event")) {
          cfg.level_overrides[col] = Level::Event;
        } else {
          throw Error(ErrorCode::InvalidConfig, fmt::format("level for '{}' must be 'case' or 'event'", col));
        }
      }
    } else if (key == "types") {
      if (!val.is_object()) throw Error(ErrorCode::InvalidConfig, "'types' must be an object");
      for (const auto& [col, t] : val.items()) {
        auto parsed = parse_type_name(json_string(t, col));
        if (!parsed) throw Error(ErrorCode::InvalidConfig, fmt::format("unknown type for column '{}'", col));
        cfg.type_overrides[col] = *parsed;
      }
    } else if (key == "format") {
      // Consumed by the API layer to pick the reader.
    } else {
      throw Error(ErrorCode::InvalidConfig, fmt::format("unknown ingest config key '{}'", key));
    }
  }
  return cfg;
}

nlohmann::json CsvIngestConfig::to_json() const {
  nlohmann::json j;
  j["delimiter"] = std::string(1, delimiter);
  j["timestamp_format"] = timestamp_format;
  nlohmann::json roles = nlohmann::json::object();
  for (const auto& [col, r] : column_roles) roles[col] = std::string(role_name(r));
  j["roles"] = roles;
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [col, l] : level_overrides) levels[col] = std::string(store::level_name(l));
  j["levels"] = levels;
  nlohmann::json types = nlohmann::json::object();
  for (const auto& [col, t] : type_overrides) types[col] = std::string(type_name(t));
  j["types"] = types;
  return j;
}

// ---------------------------------------------------------------------------
// CSV reading

std::vector<CsvRecord> read_csv_records(std::istream& in, char delimiter) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<CsvRecord> records;
  CsvRecord record;
  CsvField field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (data.size() >= 3 && data.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field = CsvField{};
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line yields one NULL field; skip it.
    if (!(record.size() == 1 && record[0].is_null())) records.push_back(std::move(record));
    record.clear();
  };

  for (; i < data.size(); ++i) {
    char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.text.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field.quoted = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      if (i + 1 < data.size() && data[i + 1] == '\n') ++i;
      end_record();
    } else {
      field.text.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::MalformedCsv, "unterminated quoted field at end of input");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view text, char delimiter, bool is_null) {
  if (is_null) return {};
  bool needs_quotes = text.empty() || text.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string_view::npos;
  if (!needs_quotes) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<Level> infer_attribute_levels(const std::vector<CsvRecord>& records,
                                          const std::vector<std::vector<std::size_t>>& cases,
                                          const std::vector<std::optional<Level>>& overrides) {
  std::vector<Level> levels(overrides.size(), Level::Case);
  for (std::size_t col = 0; col < overrides.size(); ++col) {
    if (overrides[col]) {
      levels[col] = *overrides[col];
      continue;
    }
    bool constant = true;
    for (const auto& rows : cases) {
      const CsvField& first = records[rows.front()][col];
      for (std::size_t r : rows) {
        const CsvField& f = records[r][col];
        if (f.is_null() != first.is_null() || f.text != first.text) {
          constant = false;
          break;
        }
      }
      if (!constant) break;
    }
    levels[col] = constant ? Level::Case : Level::Event;
  }
  return levels;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

// Parses one timestamp column under a configured format. In "auto" mode the
// first value fixes the format for the rest of the column.
class TimestampColumnParser {
 public:
  explicit TimestampColumnParser(std::string format) : format_(std::move(format)) {
    if (iequals(format_, "epoch_millis")) {
      kind_ = Kind::EpochMillis;
    } else if (iequals(format_, "iso8601") || iequals(format_, "iso-8601")) {
      kind_ = Kind::Iso;
    } else if (iequals(format_, "auto") || format_.empty()) {
      kind_ = Kind::Auto;
    } else {
      kind_ = Kind::Pattern;
    }
  }

  std::optional<std::int64_t> parse(std::string_view text) {
    switch (kind_) {
      case Kind::EpochMillis: return ts::parse_epoch_millis(text);
      case Kind::Iso: return ts::parse_iso8601(text);
      case Kind::Pattern: return ts::parse_with_pattern(text, format_);
      case Kind::Auto:
        if (auto v = ts::parse_epoch_millis(text)) {
          kind_ = Kind::EpochMillis;
          return v;
        }
        if (auto v = ts::parse_iso8601(text)) {
          kind_ = Kind::Iso;
          return v;
        }
        return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  enum class Kind { Auto, EpochMillis, Iso, Pattern };
  std::string format_;
  Kind kind_;
};

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string_view text) {
  if (iequals(text, "true")) return true;
  if (iequals(text, "false")) return false;
  return std::nullopt;
}

ScalarType infer_type(const std::vector<CsvRecord>& records, std::size_t col) {
  bool all_bool = true, all_number = true, any = false;
  for (const auto& rec : records) {
    const auto& f = rec[col];
    if (f.is_null()) continue;
    any = true;
    if (all_bool && !parse_bool(f.text)) all_bool = false;
    if (all_number && !parse_number(f.text)) all_number = false;
    if (!all_bool && !all_number) break;
  }
  if (!any) return ScalarType::String;
  if (all_bool) return ScalarType::Boolean;
  if (all_number) return ScalarType::Number;
  return ScalarType::String;
}

struct ColumnPlan {
  std::string name;  // attribute name in the schema
  ColumnRole role = ColumnRole::Attribute;
  ScalarType type = ScalarType::String;
  Level level = Level::Event;
  std::optional<TimestampColumnParser> ts;
};

Value convert(const CsvField& f, ColumnPlan& plan, std::size_t row) {
  if (f.is_null()) return Value::null(plan.type);
  switch (plan.type) {
    case ScalarType::String: return Value::string(f.text);
    case ScalarType::Boolean:
      if (auto b = parse_bool(f.text)) return Value::boolean(*b);
      break;
    case ScalarType::Number:
      if (auto d = parse_number(f.text)) return Value::number(*d);
      break;
    case ScalarType::Duration:
      if (auto d = ts::parse_epoch_millis(f.text)) return Value::duration(*d);
      break;
    case ScalarType::Timestamp:
      if (auto t = plan.ts->parse(f.text)) return Value::timestamp(*t);
      throw Error(ErrorCode::UnparseableTimestamp,
                  fmt::format("row {}: cannot parse '{}' in column '{}' as a timestamp", row, f.text, plan.name));
  }
  throw Error(ErrorCode::TypeMismatch,
              fmt::format("row {}: value '{}' in column '{}' is not a {}", row, f.text, plan.name, type_name(plan.type)));
}

template <typename T>
const T* find_ci(const std::map<std::string, T>& m, std::string_view key) {
  for (const auto& [k, v] : m) {
    if (iequals(k, key)) return &v;
  }
  return nullptr;
}

}  // namespace

store::EventLogPtr ingest_csv(std::istream& in, const CsvIngestConfig& config, const std::string& log_id) {
  auto records = read_csv_records(in, config.delimiter);
  if (records.empty()) throw Error(ErrorCode::MissingHeader, "input has no header row");
  CsvRecord header = std::move(records.front());
  records.erase(records.begin());
  const std::size_t width = header.size();

  for (const auto& h : header) {
    if (h.text.empty()) throw Error(ErrorCode::MissingHeader, "header contains an empty column name");
  }
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw Error(ErrorCode::MalformedCsv,
                  fmt::format("row {}: expected {} fields, found {}", r + 1, width, records[r].size()));
    }
  }

  // Config keys must name existing columns.
  auto check_known = [&](const std::string& name, std::string_view what) {
    for (const auto& h : header) {
      if (iequals(h.text, name)) return;
    }
    throw Error(ErrorCode::InvalidConfig, fmt::format("{} refers to unknown column '{}'", what, name));
  };
  for (const auto& [col, _] : config.column_roles) check_known(col, "column role");
  for (const auto& [col, _] : config.level_overrides) check_known(col, "level override");
  for (const auto& [col, _] : config.type_overrides) check_known(col, "type override");

  // Roles.
  std::vector<ColumnPlan> plans(width);
  std::optional<std::size_t> role_col[4];
  for (std::size_t c = 0; c < width; ++c) {
    plans[c].name = header[c].text;
    ColumnRole role = ColumnRole::Attribute;
    if (const auto* r = find_ci(config.column_roles, header[c].text)) {
      role = *r;
    } else if (auto implicit = parse_role(header[c].text); implicit && *implicit != ColumnRole::Attribute) {
      // Implicit role only when no explicit mapping claims that role.
      bool claimed = false;
      for (const auto& [_, r2] : config.column_roles) claimed |= r2 == *implicit;
      if (!claimed) role = *implicit;
    }
    plans[c].role = role;
    if (role != ColumnRole::Attribute) {
      auto& slot = role_col[static_cast<int>(role)];
      if (slot) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("more than one column mapped to {}", role_name(role)));
      }
      slot = c;
      plans[c].name = std::string(role_name(role));
    }
  }
  for (auto role : {ColumnRole::CaseId, ColumnRole::EventName, ColumnRole::EndTime}) {
    if (!role_col[static_cast<int>(role)]) {
      throw Error(ErrorCode::InvalidConfig, fmt::format("no column is mapped to {}", role_name(role)));
    }
  }
  const std::size_t case_col = *role_col[static_cast<int>(ColumnRole::CaseId)];

  // Group rows by case id, in order of first appearance.
  std::vector<std::vector<std::size_t>> cases;
  std::vector<std::string> case_ids;
  {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < records.size(); ++r) {
      const auto& f = records[r][case_col];
      if (f.is_null()) {
        throw Error(ErrorCode::MissingRequiredValue, fmt::format("row {}: case_id is empty", r + 1));
      }
      auto [it, inserted] = index.emplace(f.text, cases.size());
      if (inserted) {
        cases.emplace_back();
        case_ids.push_back(f.text);
      }
      cases[it->second].push_back(r);
    }
  }
  for (auto role : {ColumnRole::EventName, ColumnRole::EndTime}) {
    std::size_t c = *role_col[static_cast<int>(role)];
    for (std::size_t r = 0; r < records.size(); ++r) {
      if (records[r][c].is_null()) {
        throw Error(ErrorCode::MissingRequiredValue, fmt::format("row {}: {} is empty", r + 1, role_name(role)));
      }
    }
  }

  // Types and levels.
  std::vector<std::optional<Level>> level_overrides(width);
  for (std::size_t c = 0; c < width; ++c) {
    auto& plan = plans[c];
    const auto* lvl = find_ci(config.level_overrides, header[c].text);
    const auto* type = find_ci(config.type_overrides, header[c].text);
    switch (plan.role) {
      case ColumnRole::CaseId:
        if ((lvl && *lvl != Level::Case) || (type && *type != ScalarType::String)) {
          throw Error(ErrorCode::InvalidConfig, "case_id must be a case-level String column");
        }
        plan.type = ScalarType::String;
        level_overrides[c] = Level::Case;
        break;
      case ColumnRole::EventName:
        if ((lvl && *lvl != Level::Event) || (type && *type != ScalarType::String)) {
          throw Error(ErrorCode::InvalidConfig, "event_name must be an event-level String column");
        }
        plan.type = ScalarType::String;
        level_overrides[c] = Level::Event;
        break;
      case ColumnRole::EndTime:
      case ColumnRole::StartTime:
        if ((lvl && *lvl != Level::Event) || (type && *type != ScalarType::Timestamp)) {
          throw Error(ErrorCode::InvalidConfig, "end_time/start_time must be event-level Timestamp columns");
        }
        plan.type = ScalarType::Timestamp;
        level_overrides[c] = Level::Event;
        break;
      case ColumnRole::Attribute:
        plan.type = type ? *type : infer_type(records, c);
        if (lvl) level_overrides[c] = *lvl;
        break;
    }
    if (plan.type == ScalarType::Timestamp) plan.ts.emplace(config.timestamp_format);
  }
  auto levels = infer_attribute_levels(records, cases, level_overrides);

  // Overridden case-level columns must still be constant within each case.
  for (std::size_t c = 0; c < width; ++c) {
    if (levels[c] != Level::Case || plans[c].role == ColumnRole::CaseId) continue;
    for (std::size_t k = 0; k < cases.size(); ++k) {
      const auto& first = records[cases[k].front()][c];
      for (std::size_t r : cases[k]) {
        const auto& f = records[r][c];
        if (f.is_null() != first.is_null() || f.text != first.text) {
          throw Error(ErrorCode::InconsistentCaseAttribute,
                      fmt::format("case '{}': case-level column '{}' has more than one value", case_ids[k],
                                  plans[c].name));
        }
      }
    }
  }

  std::vector<store::Attribute> case_attrs, event_attrs;
  for (std::size_t c = 0; c < width; ++c) {
    plans[c].level = levels[c];
    (levels[c] == Level::Case ? case_attrs : event_attrs).push_back({plans[c].name, plans[c].type});
  }
  auto log = std::make_shared<store::EventLog>(log_id, store::Schema(std::move(case_attrs), std::move(event_attrs)));

  for (std::size_t k = 0; k < cases.size(); ++k) {
    store::ValueMap case_values;
    std::vector<store::ValueMap> events;
    events.reserve(cases[k].size());
    for (std::size_t c = 0; c < width; ++c) {
      if (levels[c] == Level::Case) {
        case_values.emplace(plans[c].name, convert(records[cases[k].front()][c], plans[c], cases[k].front() + 1));
      }
    }
    for (std::size_t r : cases[k]) {
      store::ValueMap ev;
      for (std::size_t c = 0; c < width; ++c) {
        if (levels[c] == Level::Event) ev.emplace(plans[c].name, convert(records[r][c], plans[c], r + 1));
      }
      events.push_back(std::move(ev));
    }
    log->append_case(case_values, events);
  }
  return log;
}

store::EventLogPtr ingest_csv_file(const std::string& path, const CsvIngestConfig& config,
                                   const std::string& log_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  return ingest_csv(in, config, log_id);
}

// ---------------------------------------------------------------------------
// XES ingestion

namespace {

namespace pt = boost::property_tree;

struct XesAttribute {
  std::string key;
  Value value;
};

// Reads the typed attribute children of a trace or event element. Unknown
// element kinds (lists, containers, ids) are skipped.
std::vector<XesAttribute> read_attributes(const pt::ptree& node) {
  std::vector<XesAttribute> out;
  for (const auto& [tag, child] : node) {
    if (tag != "string" && tag != "int" && tag != "float" && tag != "boolean" && tag != "date") continue;
    auto key = child.get_optional<std::string>("<xmlattr>.key");
    auto val = child.get_optional<std::string>("<xmlattr>.value");
    if (!key || !val) continue;
    Value v;
    if (tag == "string") {
      v = Value::string(*val);
    } else if (tag == "int" || tag == "float") {
      auto d = parse_number(*val);
      if (!d) throw Error(ErrorCode::TypeMismatch, fmt::format("attribute '{}': '{}' is not numeric", *key, *val));
      v = Value::number(*d);
    } else if (tag == "boolean") {
      auto b = parse_bool(*val);
      if (!b) throw Error(ErrorCode::TypeMismatch, fmt::format("attribute '{}': '{}' is not boolean", *key, *val));
      v = Value::boolean(*b);
    } else {
      auto t = ts::parse_iso8601(*val);
      if (!t) {
        throw Error(ErrorCode::UnparseableTimestamp, fmt::format("attribute '{}': cannot parse '{}'", *key, *val));
      }
      v = Value::timestamp(*t);
    }
    out.push_back({*key, std::move(v)});
  }
  return out;
}

// Registers `key` with the type of its first occurrence.
void declare(std::vector<store::Attribute>& attrs, const std::string& key, ScalarType type) {
  for (const auto& a : attrs) {
    if (iequals(a.name, key)) {
      if (a.type != type) {
        throw Error(ErrorCode::TypeMismatch, fmt::format("attribute '{}' appears as both {} and {}", key,
                                                         type_name(a.type), type_name(type)));
      }
      return;
    }
  }
  attrs.push_back({key, type});
}

}  // namespace

store::EventLogPtr ingest_xes(std::istream& in, const std::string& log_id) {
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedXml, fmt::format("malformed XML: {}", e.what()));
  }
  auto root = tree.get_child_optional("log");
  if (!root) throw Error(ErrorCode::MalformedXml, "document has no <log> root element");

  struct RawCase {
    std::string case_id;
    std::vector<XesAttribute> attrs;
    std::vector<std::pair<std::string, std::vector<XesAttribute>>> events;  // (name, attrs)
    std::vector<std::int64_t> times;
  };
  std::vector<RawCase> raw;
  std::vector<store::Attribute> case_attrs{{"case_id", ScalarType::String}};
  std::vector<store::Attribute> event_attrs{{"event_name", ScalarType::String}, {"end_time", ScalarType::Timestamp}};

  std::size_t trace_no = 0;
  for (const auto& [tag, trace] : *root) {
    if (tag != "trace") continue;
    ++trace_no;
    RawCase rc;
    for (auto& a : read_attributes(trace)) {
      if (a.key == "concept:name") {
        if (a.value.type() != ScalarType::String) {
          throw Error(ErrorCode::TypeMismatch, fmt::format("trace {}: concept:name must be a string", trace_no));
        }
        rc.case_id = a.value.as_string();
      } else {
        declare(case_attrs, a.key, a.value.type());
        rc.attrs.push_back(std::move(a));
      }
    }
    if (rc.case_id.empty()) {
      throw Error(ErrorCode::MissingConceptName, fmt::format("trace {} has no concept:name", trace_no));
    }
    std::size_t event_no = 0;
    for (const auto& [etag, event] : trace) {
      if (etag != "event") continue;
      ++event_no;
      std::optional<std::string> name;
      std::optional<std::int64_t> time;
      std::vector<XesAttribute> attrs;
      for (auto& a : read_attributes(event)) {
        if (a.key == "concept:name" && a.value.type() == ScalarType::String) {
          name = a.value.as_string();
        } else if (a.key == "time:timestamp" && a.value.type() == ScalarType::Timestamp) {
          time = a.value.as_int();
        } else {
          declare(event_attrs, a.key, a.value.type());
          attrs.push_back(std::move(a));
        }
      }
      if (!name) {
        throw Error(ErrorCode::MissingConceptName,
                    fmt::format("trace '{}', event {} has no concept:name", rc.case_id, event_no));
      }
      if (!time) {
        throw Error(ErrorCode::MissingTimestamp,
                    fmt::format("trace '{}', event {} has no time:timestamp", rc.case_id, event_no));
      }
      rc.events.emplace_back(*name, std::move(attrs));
      rc.times.push_back(*time);
    }
    raw.push_back(std::move(rc));
  }

  auto log = std::make_shared<store::EventLog>(log_id, store::Schema(case_attrs, event_attrs));
  for (const auto& rc : raw) {
    store::ValueMap case_values{{"case_id", Value::string(rc.case_id)}};
    for (const auto& a : rc.attrs) case_values.insert_or_assign(a.key, a.value);
    std::vector<store::ValueMap> events;
    for (std::size_t i = 0; i < rc.events.size(); ++i) {
      store::ValueMap ev{{"event_name", Value::string(rc.events[i].first)},
                         {"end_time", Value::timestamp(rc.times[i])}};
      for (const auto& a : rc.events[i].second) ev.insert_or_assign(a.key, a.value);
      events.push_back(std::move(ev));
    }
    log->append_case(case_values, events);
  }
  return log;
}

store::EventLogPtr ingest_xes_file(const std::string& path, const std::string& log_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  return ingest_xes(in, log_id);
}

}  // namespace signaldb::ingest
