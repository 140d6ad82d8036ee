#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "wcstlab/service/session_service.hpp"

namespace httplib {
class Server;
}

namespace wcst::service {

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;

  // "host:port", ":port" or "port". Throws ConfigError.
  static BindAddress parse(std::string_view text);
};

// HTTP front end for a SessionService.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();

  // Binds without serving. Port 0 picks a free port. Throws StartupError.
  int bind(const BindAddress& address);
  // Blocks until stop().
  void listen();
  void stop();
  int port() const { return port_; }

 private:
  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = 0;
};

}  // namespace wcst::service
