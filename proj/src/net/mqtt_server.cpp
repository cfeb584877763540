#include "zgw/net/mqtt_server.hpp"

#include <array>
#include <deque>

#include "zgw/mqtt/codec.hpp"

namespace zgw::net {

class MqttConnection : public std::enable_shared_from_this<MqttConnection> {
 public:
  MqttConnection(tcp::socket socket, mqtt::BrokerHost& host, Clock clock)
      : socket_(std::move(socket)), host_(host), clock_(std::move(clock)) {}

  void start() {
    std::weak_ptr<MqttConnection> weak = weak_from_this();
    session_ = host_.attach(mqtt::Sink{[weak](const mqtt::MqttPacket& p) {
                                         if (auto self = weak.lock()) self->enqueue(mqtt::encode_packet(p));
                                       },
                                       [weak](const std::string&) {
                                         if (auto self = weak.lock()) self->close_after_flush();
                                       }},
                            clock_());
    read();
  }

  void stop() { lost(); }

 private:
  void read() {
    socket_.async_read_some(asio::buffer(chunk_), [self = shared_from_this()](boost::system::error_code ec,
                                                                               std::size_t n) {
      if (ec) {
        self->lost();
        return;
      }
      self->inbox_.insert(self->inbox_.end(), self->chunk_.begin(), self->chunk_.begin() + static_cast<long>(n));
      if (self->consume()) self->read();
    });
  }

  // Feeds every complete packet to the broker. False once the connection is
  // finished.
  bool consume() {
    while (!closing_) {
      mqtt::DecodeResult r;
      try {
        r = mqtt::decode_packet(inbox_);
      } catch (const mqtt::MqttError&) {
        lost();
        return false;
      }
      if (r.status == mqtt::DecodeStatus::NeedMoreData) return true;
      inbox_.erase(inbox_.begin(), inbox_.begin() + static_cast<long>(r.consumed));
      host_.feed(session_, r.packet, clock_());
    }
    return false;
  }

  void enqueue(std::vector<std::uint8_t> bytes) {
    if (closing_ && !flushing_) return;
    outbox_.push_back(std::move(bytes));
    if (!writing_) write();
  }

  void write() {
    writing_ = true;
    asio::async_write(socket_, asio::buffer(outbox_.front()),
                      [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                        self->outbox_.pop_front();
                        if (ec) {
                          self->writing_ = false;
                          self->lost();
                          return;
                        }
                        if (!self->outbox_.empty()) {
                          self->write();
                          return;
                        }
                        self->writing_ = false;
                        if (self->flushing_) self->shutdown();
                      });
  }

  // The broker closed the session; send what is queued (e.g. a CONNACK
  // refusal), then hang up.
  void close_after_flush() {
    closing_ = true;
    flushing_ = true;
    if (!writing_) shutdown();
  }

  void lost() {
    if (!lost_reported_) {
      lost_reported_ = true;
      host_.lost(session_);
    }
    closing_ = true;
    shutdown();
  }

  void shutdown() {
    boost::system::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  tcp::socket socket_;
  mqtt::BrokerHost& host_;
  Clock clock_;
  mqtt::SessionId session_ = 0;
  std::array<std::uint8_t, 4096> chunk_{};
  std::vector<std::uint8_t> inbox_;
  std::deque<std::vector<std::uint8_t>> outbox_;
  bool writing_ = false;
  bool closing_ = false;
  bool flushing_ = false;
  bool lost_reported_ = false;
};

MqttServer::MqttServer(asio::io_context& io, mqtt::BrokerHost& host, Clock clock, const tcp::endpoint& endpoint)
    : io_(io), host_(host), clock_(std::move(clock)), acceptor_(io) {
  acceptor_.open(endpoint.protocol());
  acceptor_.set_option(asio::socket_base::reuse_address(true));
  acceptor_.bind(endpoint);
  acceptor_.listen();
  port_ = acceptor_.local_endpoint().port();
  accept();
}

MqttServer::~MqttServer() { stop(); }

std::size_t MqttServer::connections() const {
  std::size_t n = 0;
  for (const auto& c : connections_) n += !c.expired();
  return n;
}

void MqttServer::stop() {
  boost::system::error_code ignored;
  acceptor_.close(ignored);
  for (auto& weak : connections_) {
    if (auto c = weak.lock()) c->stop();
  }
  connections_.clear();
}

void MqttServer::accept() {
  acceptor_.async_accept(io_, [this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::erase_if(connections_, [](const auto& w) { return w.expired(); });
    auto c = std::make_shared<MqttConnection>(std::move(socket), host_, clock_);
    connections_.push_back(c);
    c->start();
    accept();
  });
}

}  // namespace zgw::net
