#pragma once

#include "cagkit/config.hpp"
#include "cagkit/store.hpp"
#include "cagkit/workspace.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <string>

namespace cagkit {

/// HTTP status for an engine error code.
int http_status(ErrorCode code);

/// `{"error": {"code", "message", "details"?}}`
nlohmann::json error_body(const Error& e);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// REST front end over a store and a workspace. `handle` is the whole
/// request pipeline and works without sockets; `start`/`run` put it behind
/// an HTTP server.
class ApiService {
 public:
  ApiService(StatementStore& store, Workspace& workspace, Config config);
  ~ApiService();

  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  /// `target` is the raw request target (percent-encoded path plus query).
  ApiResponse handle(const std::string& method, const std::string& target, const std::string& body,
                     const std::map<std::string, std::string>& headers = {});

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port. PortInUse if binding fails.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cagkit
