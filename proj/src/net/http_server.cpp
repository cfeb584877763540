#include "zgw/net/http_server.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <sstream>

#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace zgw::net {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".yaml" || ext == ".yml") return "application/yaml";
  return "application/octet-stream";
}

// Resolves a request path inside root, refusing anything that climbs out.
std::optional<std::filesystem::path> static_file(const std::filesystem::path& root, std::string_view target) {
  std::string path(target.substr(0, target.find('?')));
  path = api::percent_decode(path);
  if (path.find("..") != std::string::npos) return std::nullopt;
  if (path.empty() || path.back() == '/') path += "index.html";
  auto file = root / std::filesystem::path(path).relative_path();
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) {
    // Single-page app: unknown paths fall back to the index.
    file = root / "index.html";
    if (!std::filesystem::is_regular_file(file, ec)) return std::nullopt;
  }
  return file;
}

}  // namespace

class EventSession : public std::enable_shared_from_this<EventSession> {
 public:
  EventSession(tcp::socket socket, api::EventHub& hub, double heartbeat_s)
      : ws_(std::move(socket)), hub_(hub), heartbeat_(ws_.get_executor()), heartbeat_s_(heartbeat_s) {}

  ~EventSession() { hub_.unsubscribe(subscription_); }

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->on_accept();
    });
  }

  void stop() {
    finish();
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
    beast::get_lowest_layer(ws_).close();
  }

 private:
  void on_accept() {
    std::weak_ptr<EventSession> weak = weak_from_this();
    subscription_ = hub_.subscribe([weak](const api::ApiEvent& e) {
      if (auto self = weak.lock()) self->send(api::to_json(e).dump());
    });
    schedule_heartbeat();
    read();
  }

  void read() {
    ws_.async_read(inbound_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->finish();
        return;
      }
      // Clients have nothing to say on this stream; discard.
      self->inbound_.consume(self->inbound_.size());
      self->read();
    });
  }

  void send(std::string text) {
    if (finished_) return;
    outbox_.push_back(std::move(text));
    if (!writing_) write();
  }

  void write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->outbox_.pop_front();
      if (ec) {
        self->writing_ = false;
        self->finish();
        return;
      }
      if (self->outbox_.empty()) {
        self->writing_ = false;
      } else {
        self->write();
      }
    });
  }

  void schedule_heartbeat() {
    heartbeat_.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(heartbeat_s_)));
    heartbeat_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->finished_) return;
      self->ws_.async_ping({}, [self](beast::error_code ping_ec) {
        if (ping_ec) {
          self->finish();
          return;
        }
        self->schedule_heartbeat();
      });
    });
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    hub_.unsubscribe(subscription_);
    heartbeat_.cancel();
  }

  websocket::stream<beast::tcp_stream> ws_;
  api::EventHub& hub_;
  asio::steady_timer heartbeat_;
  double heartbeat_s_;
  beast::flat_buffer inbound_;
  std::deque<std::string> outbox_;
  std::uint64_t subscription_ = 0;
  bool writing_ = false;
  bool finished_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, HttpServer& server) : stream_(std::move(socket)), server_(server) {}

  void run() { read(); }

  void stop() {
    beast::error_code ignored;
    stream_.socket().shutdown(tcp::socket::shutdown_both, ignored);
    stream_.close();
  }

 private:
  void read() {
    request_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, request_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec == http::error::end_of_stream) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (ec) return;

    const std::string target(request_.target());
    if (websocket::is_upgrade(request_)) {
      if (target.substr(0, target.find('?')) == "/api/events") {
        stream_.expires_never();
        auto session = std::make_shared<EventSession>(stream_.release_socket(), server_.hub(),
                                                      server_.options().heartbeat_s);
        server_.track(session);
        session->run(std::move(request_));
        return;
      }
    }
    respond(handle());
  }

  http::response<http::string_body> handle() {
    const std::string target(request_.target());
    http::response<http::string_body> res{http::status::ok, request_.version()};
    res.set(http::field::server, "zgw");
    res.keep_alive(request_.keep_alive());

    const auto& static_dir = server_.options().static_dir;
    if (request_.method() == http::verb::get && target.rfind("/api/", 0) != 0 && !static_dir.empty()) {
      if (auto file = static_file(static_dir, target)) {
        std::ifstream in(*file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        res.set(http::field::content_type, std::string(mime_type(*file)));
        res.body() = ss.str();
        res.prepare_payload();
        return res;
      }
    }

    api::ApiRequest req{std::string(request_.method_string()), target, request_.body()};
    api::ApiResponse out;
    try {
      out = server_.router().handle(req);
    } catch (const std::exception& e) {
      out = {500, nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump(), "application/json"};
    }
    res.result(static_cast<http::status>(out.status));
    if (!out.body.empty()) {
      res.set(http::field::content_type, out.content_type);
      res.body() = std::move(out.body);
    }
    res.prepare_payload();
    return res;
  }

  void respond(http::response<http::string_body> res) {
    auto owned = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *owned, [self = shared_from_this(), owned](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (owned->need_eof()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  HttpServer& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
};

HttpServer::HttpServer(asio::io_context& io, api::ApiRouter& router, api::EventHub& hub,
                       const tcp::endpoint& endpoint, HttpOptions options)
    : io_(io), router_(router), hub_(hub), options_(std::move(options)), acceptor_(io) {
  acceptor_.open(endpoint.protocol());
  acceptor_.set_option(asio::socket_base::reuse_address(true));
  acceptor_.bind(endpoint);
  acceptor_.listen();
  port_ = acceptor_.local_endpoint().port();
  accept();
}

HttpServer::~HttpServer() { stop(); }

std::size_t HttpServer::event_sessions() const {
  std::size_t n = 0;
  for (const auto& s : event_sessions_) n += !s.expired();
  return n;
}

void HttpServer::track(const std::shared_ptr<EventSession>& session) {
  std::erase_if(event_sessions_, [](const auto& w) { return w.expired(); });
  event_sessions_.push_back(session);
}

void HttpServer::stop() {
  boost::system::error_code ignored;
  acceptor_.close(ignored);
  for (auto& weak : sessions_) {
    if (auto s = weak.lock()) s->stop();
  }
  for (auto& weak : event_sessions_) {
    if (auto s = weak.lock()) s->stop();
  }
  sessions_.clear();
  event_sessions_.clear();
}

void HttpServer::accept() {
  acceptor_.async_accept(io_, [this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::erase_if(sessions_, [](const auto& w) { return w.expired(); });
    auto session = std::make_shared<HttpSession>(std::move(socket), *this);
    sessions_.push_back(session);
    session->run();
    accept();
  });
}

}  // namespace zgw::net
