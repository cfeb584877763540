#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include <boost/asio.hpp>

#include "zgw/api/events.hpp"
#include "zgw/api/router.hpp"

namespace zgw::net {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct HttpOptions {
  double heartbeat_s = 15.0;
  // Served for GET requests outside /api when set (the dashboard bundle).
  std::filesystem::path static_dir;
};

class HttpSession;
class EventSession;

// HTTP/1.1 front of ApiRouter plus the /api/events WebSocket. Single-threaded:
// requests are answered on the io_context thread that owns the gateway.
class HttpServer {
 public:
  HttpServer(asio::io_context& io, api::ApiRouter& router, api::EventHub& hub, const tcp::endpoint& endpoint,
             HttpOptions options = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  std::uint16_t port() const { return port_; }
  std::size_t event_sessions() const;
  void stop();

  // Used by sessions.
  api::ApiRouter& router() { return router_; }
  api::EventHub& hub() { return hub_; }
  const HttpOptions& options() const { return options_; }
  void track(const std::shared_ptr<EventSession>& session);

 private:
  void accept();

  asio::io_context& io_;
  api::ApiRouter& router_;
  api::EventHub& hub_;
  HttpOptions options_;
  tcp::acceptor acceptor_;
  std::uint16_t port_ = 0;
  std::vector<std::weak_ptr<HttpSession>> sessions_;
  std::vector<std::weak_ptr<EventSession>> event_sessions_;
};

}  // namespace zgw::net
