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
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "signaldb/engine.hpp"
#include "signaldb/error.hpp"

namespace httplib {
class Server;
}

namespace signaldb::api {

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceConfig {
  std::optional<std::string> data_dir;
  std::size_t max_upload_bytes = std::size_t{256} << 20;
};

/// HTTP status for an error code: 404 UnknownLog, 409 DuplicateLogId, 500
/// for IoError/Internal, 400 otherwise.
int http_status(ErrorCode code);

/// Request handlers independent of the transport. Response bodies are the
/// library's serializations of the result or diagnostic.
class Service {
 public:
  Service(std::shared_ptr<Engine> engine, ServiceConfig config = {});

  const std::shared_ptr<Engine>& engine() const { return engine_; }
  const ServiceConfig& config() const { return config_; }

  /// POST /signal/queries with body {"query": "...", "logId": "..."}.
  HttpResponse post_query(std::string_view body) const;
  /// POST /logs. `config_json` may be empty.
  HttpResponse post_log(const std::string& file_name, const std::string& content, std::string_view config_json,
                        const std::string& log_id) const;
  /// GET /logs
  HttpResponse get_logs() const;
  /// DELETE /logs/{logId}
  HttpResponse delete_log(const std::string& log_id) const;

  /// Registers the routes above on `server`.
  void bind(httplib::Server& server) const;

 private:
  std::shared_ptr<Engine> engine_;
  ServiceConfig config_;
};

HttpResponse error_response(const Diagnostic& diag);

/// Blocks serving on host:port until the server stops. Returns false when
/// the port cannot be bound.
bool http_serve(const Service& service, const std::string& host, int port);

}  // namespace signaldb::api
