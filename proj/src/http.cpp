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

#include "signaldb/http.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "signaldb/api.hpp"
#include "signaldb/serialize.hpp"

namespace signaldb::api {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownLog: return 404;
    case ErrorCode::DuplicateLogId: return 409;
    case ErrorCode::IoError:
    case ErrorCode::Internal: return 500;
    default: return 400;
  }
}

HttpResponse error_response(const Diagnostic& diag) {
  return {http_status(diag.code), to_json(diag).dump()};
}

Service::Service(std::shared_ptr<Engine> engine, ServiceConfig config)
    : engine_(std::move(engine)), config_(std::move(config)) {}

HttpResponse Service::post_query(std::string_view body) const {
  nlohmann::json request = nlohmann::json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) {
    return error_response({ErrorCode::InvalidRequest, "request body must be a JSON object", {}});
  }
  auto query = request.find("query");
  if (query == request.end() || !query->is_string()) {
    return error_response({ErrorCode::InvalidRequest, "'query' must be a string", {}});
  }
  std::optional<std::string> log_id;
  if (auto id = request.find("logId"); id != request.end() && !id->is_null()) {
    if (!id->is_string()) return error_response({ErrorCode::InvalidRequest, "'logId' must be a string", {}});
    log_id = id->get<std::string>();
  }
  try {
    return {200, to_json_string(engine_->query(query->get<std::string>(), log_id))};
  } catch (const Error& e) {
    return error_response(Diagnostic::from(e));
  } catch (const std::exception& e) {
    return error_response({ErrorCode::Internal, e.what(), {}});
  }
}

HttpResponse Service::post_log(const std::string& file_name, const std::string& content,
                               std::string_view config_json, const std::string& log_id) const {
  if (!is_valid_log_id(log_id)) {
    return error_response({ErrorCode::InvalidRequest, fmt::format("invalid logId '{}'", log_id), {}});
  }
  if (content.size() > config_.max_upload_bytes) {
    return {413, to_json(Diagnostic{ErrorCode::InvalidRequest, "upload exceeds the size limit", {}}).dump()};
  }
  auto kind = source_kind(file_name);
  if (!kind) kind = SourceKind::Csv;
  nlohmann::json config;
  if (!config_json.empty()) {
    config = nlohmann::json::parse(config_json, nullptr, false);
    if (config.is_discarded()) return error_response({ErrorCode::InvalidConfig, "config is not valid JSON", {}});
  }
  try {
    if (engine_->catalog().find(log_id)) {
      throw Error(ErrorCode::DuplicateLogId, fmt::format("log '{}' already exists", log_id));
    }
    auto log = load_log(content, *kind, config, log_id);
    engine_->catalog().add(log);
    if (config_.data_dir) {
      try {
        persist_log(*config_.data_dir, log_id, *kind, content, config);
      } catch (...) {
        engine_->catalog().remove(log_id);
        throw;
      }
    }
    nlohmann::json body = {{"logId", log_id}, {"cases", log->case_count()}, {"events", log->event_count()}};
    return {201, body.dump()};
  } catch (const Error& e) {
    return error_response(Diagnostic::from(e));
  } catch (const std::exception& e) {
    return error_response({ErrorCode::Internal, e.what(), {}});
  }
}

HttpResponse Service::get_logs() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& log : engine_->catalog().list()) {
    nlohmann::json schema;
    for (auto level : {store::Level::Case, store::Level::Event}) {
      nlohmann::json attrs = nlohmann::json::array();
      for (const auto& a : log->schema().attributes(level)) {
        attrs.push_back({{"name", a.name}, {"type", type_name(a.type)}});
      }
      schema[std::string(store::level_name(level))] = std::move(attrs);
    }
    list.push_back(
        {{"logId", log->log_id()}, {"cases", log->case_count()}, {"events", log->event_count()}, {"schema", schema}});
  }
  return {200, list.dump()};
}

HttpResponse Service::delete_log(const std::string& log_id) const {
  if (!engine_->catalog().remove(log_id)) {
    return error_response({ErrorCode::UnknownLog, fmt::format("unknown log '{}'", log_id), {}});
  }
  if (config_.data_dir && is_valid_log_id(log_id)) unpersist_log(*config_.data_dir, log_id);
  return {204, "", ""};
}

namespace {

void reply(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  if (!r.body.empty() || !r.content_type.empty()) res.set_content(r.body, r.content_type);
}

}  // namespace

void Service::bind(httplib::Server& server) const {
  server.set_payload_max_length(config_.max_upload_bytes);
  server.Post("/signal/queries", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_query(req.body));
  });
  server.Post("/logs", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data() || !req.has_file("file")) {
      reply(res, error_response({ErrorCode::InvalidRequest, "expected multipart field 'file'", {}}));
      return;
    }
    auto file = req.get_file_value("file");
    std::string config = req.has_file("config") ? req.get_file_value("config").content : std::string();
    std::string log_id = req.has_file("logId") ? req.get_file_value("logId").content : std::string();
    reply(res, post_log(file.filename, file.content, config, log_id));
  });
  server.Get("/logs", [this](const httplib::Request&, httplib::Response& res) { reply(res, get_logs()); });
  server.Delete(R"(/logs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, delete_log(req.matches[1].str()));
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    std::string message = res.status == 413 ? "upload exceeds the size limit" : httplib::status_message(res.status);
    res.set_content(to_json(Diagnostic{ErrorCode::InvalidRequest, message, {}}).dump(), "application/json");
  });
}

bool http_serve(const Service& service, const std::string& host, int port) {
  httplib::Server server;
  service.bind(server);
  return server.listen(host, port);
}

}  // namespace signaldb::api
