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

#include "projection/api_service.hpp"

#include <algorithm>
#include <sstream>

#include "httplib.h"
#include "projection/error.hpp"

namespace projection::api {
namespace {

using nlohmann::json;

Point2 PointFromJson(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kInvalidArgument, "coordinates must be [x, y]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json PointToJson(Point2 p) { return json::array({p.x, p.y}); }

std::optional<ItemKind> KindFromJson(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  auto kind = ParseItemKind(it->get<std::string>());
  if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown kind filter " + it->dump());
  return kind;
}

std::size_t PositiveSize(const json& j, const char* key) {
  const auto v = j.at(key).get<std::int64_t>();
  if (v <= 0) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be positive");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> Split(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = std::min(path.find('/', start), path.size());
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

Response Json(int status, const json& body) {
  return {status, body.dump(-1, ' ', false, json::error_handler_t::replace), {}};
}

Response ErrorResponse(int status, std::string_view code, const std::string& message) {
  return Json(status, {{"error", code}, {"message", message}});
}

}  // namespace

EntityTreeNode TreeFromJson(const json& j) {
  EntityTreeNode node;
  node.node_id = j.at("nodeId").get<std::string>();
  node.text = j.at("text").get<std::string>();
  if (auto it = j.find("anchor"); it != j.end() && !it->is_null()) node.anchor = PointFromJson(*it);
  if (auto it = j.find("children"); it != j.end()) {
    for (const auto& child : *it) node.children.push_back(TreeFromJson(child));
  }
  return node;
}

json TreeToJson(const EntityTreeNode& tree) {
  json children = json::array();
  for (const auto& c : tree.children) children.push_back(TreeToJson(c));
  json j = {{"nodeId", tree.node_id}, {"text", tree.text}, {"children", std::move(children)}};
  if (tree.anchor) j["anchor"] = PointToJson(*tree.anchor);
  return j;
}

QueryRequest QueryRequestFromJson(const json& j) {
  QueryRequest r;
  r.map_id = j.at("mapId").get<std::string>();
  r.tree = TreeFromJson(j.at("tree"));
  if (auto it = j.find("params"); it != j.end()) {
    const auto& p = *it;
    if (p.contains("rootBreadth")) r.params.root_breadth = PositiveSize(p, "rootBreadth");
    if (p.contains("perNodeK")) r.params.per_node_k = PositiveSize(p, "perNodeK");
    r.params.kind_filter = KindFromJson(p, "kindFilter");
  }
  if (j.contains("targetClusters") && !j.at("targetClusters").is_null()) {
    r.target_clusters = PositiveSize(j, "targetClusters");
  }
  if (j.contains("zoom") && !j.at("zoom").is_null()) r.zoom = j.at("zoom").get<double>();
  if (j.contains("maxZoom")) r.max_zoom = j.at("maxZoom").get<double>();
  if (j.contains("radius")) r.radius = j.at("radius").get<double>();
  r.params.Validate();
  return r;
}

json QueryRequestToJson(const QueryRequest& r) {
  json params = {{"rootBreadth", r.params.root_breadth}, {"perNodeK", r.params.per_node_k}};
  if (r.params.kind_filter) params["kindFilter"] = ItemKindName(*r.params.kind_filter);
  json j = {{"mapId", r.map_id}, {"tree", TreeToJson(r.tree)}, {"params", params},
            {"maxZoom", r.max_zoom}, {"radius", r.radius}};
  if (r.target_clusters) j["targetClusters"] = *r.target_clusters;
  if (r.zoom) j["zoom"] = *r.zoom;
  return j;
}

json QueryResponseToJson(const QueryResponse& response) {
  json nodes = json::array();
  for (const auto& node : response.nodes) {
    json hits = json::array();
    for (const auto& [hit, kind] : node.hits) {
      hits.push_back({{"itemId", hit.item_id}, {"kind", ItemKindName(kind)}, {"score", hit.score}});
    }
    json clusters = json::array();
    for (const auto& c : node.clusters.clusters) {
      clusters.push_back({{"clusterId", c.id}, {"memberIds", c.member_ids},
                          {"centroid", PointToJson(c.centroid)}, {"label", c.label}});
    }
    json merges = json::array();
    for (const auto& m : node.merges) {
      merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"clusterId", m.id}});
    }
    json points = json::array();
    for (const auto& p : node.points) points.push_back({{"itemId", p.item_id}, {"x", p.x}, {"y", p.y}});
    nodes.push_back({{"nodeId", node.node_id},
                     {"parentId", node.parent_id ? json(*node.parent_id) : json(nullptr)},
                     {"anchor", PointToJson(node.anchor)},
                     {"hits", std::move(hits)},
                     {"clusters", std::move(clusters)},
                     {"merges", std::move(merges)},
                     {"points", std::move(points)}});
  }
  return {{"mapId", response.map_id}, {"seed", response.seed}, {"nodes", std::move(nodes)}};
}

QueryResponse QueryResponseFromJson(const json& j) {
  QueryResponse r;
  r.map_id = j.at("mapId").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& n : j.at("nodes")) {
    NodeResponse node;
    node.node_id = n.at("nodeId").get<std::string>();
    if (!n.at("parentId").is_null()) node.parent_id = n.at("parentId").get<std::string>();
    node.anchor = PointFromJson(n.at("anchor"));
    for (const auto& h : n.at("hits")) {
      auto kind = ParseItemKind(h.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown kind " + h.at("kind").dump());
      node.hits.emplace_back(Hit{h.at("itemId").get<std::string>(), h.at("score").get<double>()}, *kind);
    }
    for (const auto& c : n.at("clusters")) {
      node.clusters.clusters.push_back({c.at("clusterId").get<clustering::ClusterId>(),
                                        c.at("memberIds").get<std::vector<std::string>>(),
                                        PointFromJson(c.at("centroid")), c.at("label").get<std::string>()});
    }
    for (const auto& m : n.at("merges")) {
      node.merges.push_back({m.at("left").get<clustering::ClusterId>(), m.at("right").get<clustering::ClusterId>(),
                             m.at("height").get<double>(), m.at("clusterId").get<clustering::ClusterId>()});
    }
    for (const auto& p : n.at("points")) {
      node.points.push_back({p.at("itemId").get<std::string>(), p.at("x").get<double>(), p.at("y").get<double>()});
    }
    r.nodes.push_back(std::move(node));
  }
  return r;
}

json HitsToJson(const Neighborhood& hits, const VectorIndex& index) {
  json out = json::array();
  for (const auto& h : hits) {
    out.push_back({{"itemId", h.item_id}, {"kind", ItemKindName(index.Get(h.item_id).kind)}, {"score", h.score}});
  }
  return out;
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownId:
    case ErrorCode::kUnknownMap:
      return 404;
    case ErrorCode::kCycleDetected:
    case ErrorCode::kCrossMapLink:
    case ErrorCode::kDuplicateId:
      return 409;
    case ErrorCode::kRemoteUnavailable:
      return 503;
    case ErrorCode::kCorruptData:
    case ErrorCode::kIoError:
      return 500;
    default:
      return 400;
  }
}

ApiService::ApiService(Engine& engine, ServiceOptions options)
    : engine_(engine), options_(std::move(options)) {}

void ApiService::Decorate(Response& response) const {
  response.headers["Content-Type"] = "application/json";
  response.headers["X-Engine-Seed"] = std::to_string(engine_.seed());
  if (!options_.cors_origin.empty()) {
    response.headers["Access-Control-Allow-Origin"] = options_.cors_origin;
    response.headers["Access-Control-Allow-Methods"] = "GET, POST, PUT, PATCH, DELETE, OPTIONS";
    response.headers["Access-Control-Allow-Headers"] = "Content-Type";
    response.headers["Access-Control-Expose-Headers"] = "X-Engine-Seed";
  }
}

Response ApiService::Handle(const Request& request) const {
  Response response;
  try {
    response = Dispatch(request);
  } catch (const Error& e) {
    response = ErrorResponse(StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const json::exception& e) {
    response = ErrorResponse(400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    response = ErrorResponse(500, "Internal", e.what());
  }
  Decorate(response);
  return response;
}

Response ApiService::Dispatch(const Request& request) const {
  const auto parts = Split(request.path);
  const std::string& method = request.method;
  auto body = [&] { return request.body.empty() ? json::object() : json::parse(request.body); };
  auto route = [&](std::string_view m, std::initializer_list<std::string_view> shape) {
    if (method != m || parts.size() != shape.size()) return false;
    std::size_t i = 0;
    for (auto seg : shape) {
      if (seg != "*" && seg != parts[i]) return false;
      ++i;
    }
    return true;
  };

  if (method == "OPTIONS") return {204, "", {}};

  if (route("GET", {"health"})) return Json(200, {{"ok", true}});

  if (route("POST", {"documents"})) {
    const auto b = body();
    const auto record = engine_.AddDocument(b.value("title", ""), b.value("url", ""), b.at("text").get<std::string>());
    return Json(201, ToJson(record));
  }
  if (route("GET", {"documents", "*"})) return Json(200, ToJson(engine_.store().GetDocument(parts[1])));

  if (route("POST", {"query"})) {
    return Json(200, QueryResponseToJson(engine_.Query(QueryRequestFromJson(body()))));
  }

  if (route("POST", {"maps"})) return Json(201, ToJson(engine_.CreateMap(body().at("name").get<std::string>())));
  if (route("GET", {"maps"})) {
    json maps = json::array();
    for (const auto& m : engine_.store().ListMaps()) maps.push_back(ToJson(m));
    return Json(200, {{"maps", std::move(maps)}});
  }
  if (route("GET", {"maps", "*"})) {
    const auto view = engine_.store().GetMap(parts[1]);
    json entities = json::array();
    for (const auto& e : view.entities) entities.push_back(ToJson(e));
    return Json(200, {{"map", ToJson(view.map)}, {"entities", std::move(entities)}});
  }
  if (route("POST", {"maps", "*", "entities"})) {
    const auto b = body();
    std::optional<std::string> parent;
    if (auto it = b.find("parentEntityId"); it != b.end() && !it->is_null()) parent = it->get<std::string>();
    const Point2 at = b.contains("coordinates") ? PointFromJson(b.at("coordinates")) : Point2{};
    return Json(201, ToJson(engine_.CreateEntity(parts[1], b.at("text").get<std::string>(), at, parent)));
  }
  if (route("PATCH", {"entities", "*"})) {
    const auto b = body();
    EntityPatch patch;
    if (b.contains("coordinates")) patch.coordinates = PointFromJson(b.at("coordinates"));
    if (b.contains("text")) patch.text = b.at("text").get<std::string>();
    if (auto it = b.find("parentEntityId"); it != b.end()) {
      patch.parent = it->is_null() ? std::optional<std::string>{} : std::optional<std::string>{it->get<std::string>()};
    }
    return Json(200, ToJson(engine_.PatchEntity(parts[1], patch)));
  }
  if (route("DELETE", {"entities", "*"})) {
    engine_.DeleteEntity(parts[1]);
    return Json(200, {{"deleted", parts[1]}});
  }

  if (route("GET", {"menu"})) return Json(200, ToJson(engine_.store().Menu()));
  if (route("PUT", {"menu"})) {
    return Json(200, ToJson(engine_.SelectMap(body().at("selectedMapId").get<std::string>())));
  }

  if (route("POST", {"group-search"})) {
    const auto b = body();
    const auto members = b.at("memberIds").get<std::vector<std::string>>();
    const std::size_t k = b.contains("k") ? PositiveSize(b, "k") : 20;
    const auto hits = engine_.GroupSearch(members, k, KindFromJson(b, "kindFilter"));
    return Json(200, {{"hits", HitsToJson(hits, engine_.index())}});
  }

  if (route("POST", {"embed"})) {
    const auto texts = body().at("texts").get<std::vector<std::string>>();
    json vectors = json::array();
    for (const auto& v : engine_.embedder().EmbedBatch(texts)) {
      vectors.push_back(std::vector<float>(v.values().begin(), v.values().end()));
    }
    return Json(200, {{"dimension", engine_.embedder().dimension()}, {"vectors", std::move(vectors)}});
  }

  if (route("GET", {"debug", "validate"})) {
    const auto problems = engine_.Validate();
    return Json(problems.empty() ? 200 : 500, {{"ok", problems.empty()}, {"problems", problems}});
  }

  return ErrorResponse(404, "NotFound", method + " " + request.path);
}

void ApiService::Bind(httplib::Server& server) const {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const Response out = Handle({req.method, req.path, req.body});
    res.status = out.status;
    for (const auto& [k, v] : out.headers) {
      if (k != "Content-Type") res.set_header(k, v);
    }
    if (out.status != 204) res.set_content(out.body, "application/json");
  };
  const std::string any = R"(/.*)";
  server.Get(any, handler);
  server.Post(any, handler);
  server.Put(any, handler);
  server.Patch(any, handler);
  server.Delete(any, handler);
  server.Options(any, handler);
}

}  // namespace projection::api
