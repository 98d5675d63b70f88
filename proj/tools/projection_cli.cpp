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

// Command-line entry point: corpus ingestion and the HTTP server.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "projection/api_service.hpp"
#include "projection/corpus.hpp"
#include "projection/engine.hpp"
#include "projection/error.hpp"

namespace {

httplib::Server* g_server = nullptr;

void StopServer(int) {
  if (g_server) g_server->stop();
}

struct EngineOptions {
  std::uint64_t seed = 42;
  std::string data_dir;
  std::size_t dimension = 512;
  std::string embedder_url;
  std::string cors_origin = "*";

  void Register(CLI::App& app) {
    app.add_option("--seed", seed, "Engine and embedder seed")->envname("PROJECTION_SEED");
    app.add_option("--data-dir", data_dir, "Persist the store under this directory")->envname("PROJECTION_DATA_DIR");
    app.add_option("--dimension", dimension, "Embedding dimension")->check(CLI::PositiveNumber);
    app.add_option("--embedder-url", embedder_url, "Use a remote /embed service instead of the local embedder");
    app.add_option("--cors-origin", cors_origin, "Allowed browser origin; empty disables CORS");
  }

  projection::EngineConfig Config() const {
    projection::EngineConfig c;
    c.seed = seed;
    c.embedder.seed = seed;
    c.embedder.dimension = dimension;
    if (!embedder_url.empty()) {
      c.embedder.backend = projection::EmbedderBackend::kRemoteService;
      c.embedder.remote_url = embedder_url;
    }
    if (!data_dir.empty()) c.data_dir = data_dir;
    return c;
  }
};

// "host:port" or ":port" or "port".
std::pair<std::string, int> ParseListen(const std::string& address) {
  const auto colon = address.rfind(':');
  std::string host = colon == std::string::npos ? "" : address.substr(0, colon);
  const std::string port = colon == std::string::npos ? address : address.substr(colon + 1);
  if (host.empty()) host = "0.0.0.0";
  return {host, std::stoi(port)};
}

int Serve(projection::Engine& engine, const std::string& address, const std::string& cors_origin) {
  auto [host, port] = ParseListen(address);
  projection::api::ApiService service(engine, {cors_origin});
  httplib::Server server;
  service.Bind(server);
  g_server = &server;
  std::signal(SIGINT, StopServer);
  std::signal(SIGTERM, StopServer);
  if (port == 0) {
    port = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    port = -1;
  }
  if (port < 0) {
    std::cerr << "error: cannot listen on " << address << "\n";
    return 1;
  }
  std::cerr << "listening on " << host << ":" << port << " (seed " << engine.seed() << ")" << std::endl;
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection knowledge-map engine"};
  app.require_subcommand(1);

  EngineOptions ingest_options;
  std::string corpus_path;
  std::string kind = "document";
  std::string ingest_serve;
  auto* ingest = app.add_subcommand("ingest", "Load a JSON Lines corpus as documents");
  ingest->add_option("path", corpus_path, "Corpus file, one {title, url, text} object per line")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--kind", kind, "Record kind")->check(CLI::IsMember({"document"}));
  ingest->add_option("--serve", ingest_serve, "After loading, serve HTTP on host:port");
  ingest_options.Register(*ingest);

  EngineOptions serve_options;
  std::string listen = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--listen", listen, "host:port")->envname("PROJECTION_LISTEN");
  serve_options.Register(*serve);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      projection::Engine engine(ingest_options.Config());
      const std::size_t n = projection::IngestCorpus(engine, corpus_path);
      std::cout << n << (n == 1 ? " document" : " documents") << std::endl;
      if (!ingest_serve.empty()) return Serve(engine, ingest_serve, ingest_options.cors_origin);
      return 0;
    }
    projection::Engine engine(serve_options.Config());
    return Serve(engine, listen, serve_options.cors_origin);
  } catch (const projection::CorpusError& e) {
    std::cerr << "error: " << corpus_path << ": " << e.what() << "\n";
    return 1;
  } catch (const projection::Error& e) {
    std::cerr << "error: " << projection::ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
