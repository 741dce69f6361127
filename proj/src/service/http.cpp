#include "rpglite/service/http.hpp"

#include <httplib.h>

#include <stdexcept>
#include <thread>

namespace rpglite::service {

struct HttpServer::Impl {
  GameService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(GameService& s) : service(s) {}

  void dispatch(const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    r.body = req.body;
    const auto auth = req.get_header_value("Authorization");
    if (auth.rfind("Bearer ", 0) == 0) r.token = auth.substr(7);
    r.admin_token = req.get_header_value("X-Admin-Token");
    const auto out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  }
};

HttpServer::HttpServer(GameService& service, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->dispatch(req, res); };
  const std::string pattern = R"(/v1(/.*)?)";
  impl_->server.Get(pattern, handler);
  impl_->server.Post(pattern, handler);
  impl_->server.Put(pattern, handler);
  impl_->server.Delete(pattern, handler);
  if (!static_dir.empty() && !impl_->server.set_mount_point("/", static_dir.string())) {
    throw std::runtime_error("static directory not found: " + static_dir.string());
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  impl_->thread = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace rpglite::service
