#include "wcstlab/service/server.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "wcstlab/errors.hpp"

namespace wcst::service {

namespace {

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

BindAddress BindAddress::parse(std::string_view text) {
  BindAddress b;
  std::string_view port = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) b.host = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    b.port = std::stoi(std::string(port), &used);
    if (used != port.size() || b.port < 0 || b.port > 65535) throw std::out_of_range("port");
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("bad bind address '{}' (expected host:port)", text));
  }
  return b;
}

HttpServer::HttpServer(SessionService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.create_session(req.body));
  });
  s.Get(R"(/sessions/([^/]+)/trial)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.get_trial(req.matches[1].str()));
  });
  s.Post(R"(/sessions/([^/]+)/choice)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.post_choice(req.matches[1].str(), req.body));
  });
  s.Get(R"(/sessions/([^/]+)/log)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.get_log(req.matches[1].str()));
  });
  s.Get(R"(/sessions/([^/]+)/render\.svg)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, service_.render_svg(req.matches[1].str()));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const BindAddress& address) {
  if (address.port == 0) {
    port_ = server_->bind_to_any_port(address.host);
  } else {
    port_ = server_->bind_to_port(address.host, address.port) ? address.port : -1;
  }
  if (port_ <= 0) {
    throw StartupError(fmt::format("cannot bind {}:{}", address.host, address.port));
  }
  return port_;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace wcst::service
