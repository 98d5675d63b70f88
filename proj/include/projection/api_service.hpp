// Copyright (c) 2026 The Projection Authors. All Rights Reserved
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

#include <map>
#include <string>

#include "json.hpp"
#include "projection/engine.hpp"
#include "projection/error.hpp"

namespace httplib {
class Server;
}

namespace projection::api {

// Wire codecs. Field names are documented in docs/api.md.
EntityTreeNode TreeFromJson(const nlohmann::json& j);
nlohmann::json TreeToJson(const EntityTreeNode& tree);
QueryRequest QueryRequestFromJson(const nlohmann::json& j);
nlohmann::json QueryRequestToJson(const QueryRequest& request);
nlohmann::json QueryResponseToJson(const QueryResponse& response);
QueryResponse QueryResponseFromJson(const nlohmann::json& j);
nlohmann::json HitsToJson(const Neighborhood& hits, const VectorIndex& index);

/// HTTP status for an engine error code.
int StatusFor(ErrorCode code);

struct Request {
  std::string method;
  std::string path;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

struct ServiceOptions {
  std::string cors_origin = "*";  // empty disables CORS headers
};

/// Routes requests onto an Engine. `Handle` is transport-free; `Bind`
/// registers the same routes on an httplib server.
class ApiService {
 public:
  ApiService(Engine& engine, ServiceOptions options = {});

  Response Handle(const Request& request) const;
  void Bind(httplib::Server& server) const;

 private:
  Response Dispatch(const Request& request) const;
  void Decorate(Response& response) const;

  Engine& engine_;
  ServiceOptions options_;
};

}  // namespace projection::api
