#pragma once

#include <memory>
#include <string>

#include "cluesynth/service.hpp"

namespace cluesynth::http {

/// Binds the service handlers to an HTTP/1.1 listener.
class Server {
 public:
  explicit Server(Service& service);
  ~Server();

  /// Returns the bound port, or -1. Port 0 picks a free port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cluesynth::http
