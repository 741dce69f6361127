#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "rpglite/service/service.hpp"

namespace rpglite::service {

// cpp-httplib front end: /v1/* goes to the service as JSON, everything else
// is served from `static_dir` when one is given.
class HttpServer {
 public:
  explicit HttpServer(GameService& service, std::filesystem::path static_dir = {});
  ~HttpServer();

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void start();   // listen() on a background thread
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rpglite::service
