#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <boost/asio.hpp>

#include "zgw/mqtt/host.hpp"

namespace zgw::net {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

// Supplies the broker's notion of "now" in seconds.
using Clock = std::function<double()>;

class MqttConnection;

// MQTT 3.1.1 over TCP in front of a BrokerHost. Runs on the io_context's
// single thread, the same one that owns the host.
class MqttServer {
 public:
  MqttServer(asio::io_context& io, mqtt::BrokerHost& host, Clock clock, const tcp::endpoint& endpoint);
  ~MqttServer();
  MqttServer(const MqttServer&) = delete;
  MqttServer& operator=(const MqttServer&) = delete;

  std::uint16_t port() const { return port_; }
  std::size_t connections() const;
  void stop();

 private:
  void accept();

  asio::io_context& io_;
  mqtt::BrokerHost& host_;
  Clock clock_;
  tcp::acceptor acceptor_;
  std::uint16_t port_ = 0;
  std::vector<std::weak_ptr<MqttConnection>> connections_;
};

}  // namespace zgw::net
