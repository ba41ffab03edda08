#include "http_server.hpp"

#include <httplib.h>

namespace cluesynth::http {

struct Server::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

namespace {

void reply(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

Server::Server(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  // Enough workers that requests beyond the search cap reach the handler and
  // get a 503 instead of queueing.
  const int workers = service.config().max_concurrent + 4;
  srv.new_task_queue = [workers] { return new httplib::ThreadPool(static_cast<size_t>(workers)); };
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.Post("/api/infer", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, impl_->service.infer(req.body));
  });
  srv.Post("/api/apply", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, impl_->service.apply(req.body));
  });
  srv.Get("/api/meta", [this](const httplib::Request&, httplib::Response& res) { reply(res, impl_->service.meta()); });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->server.listen_after_bind(); }

void Server::stop() { impl_->server.stop(); }

void Server::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace cluesynth::http
