#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <boost/asio.hpp>

#include "zgw/mqtt/bridge.hpp"
#include "zgw/mqtt/host.hpp"

namespace zgw::net {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct UplinkConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 1883;
  std::string client_id = "zgw-edge";
  // Local topics forwarded upstream.
  std::vector<std::string> topics{"gw/#"};
  mqtt::BridgeConfig buffer;
  double retry_s = 5.0;
  std::uint16_t keepalive_s = 60;
};

// Forwards local publishes to a remote (fog/cloud) broker through a Bridge:
// messages are buffered while the link is down and resent after reconnect.
// Must live on the io_context thread that owns the local BrokerHost.
class MqttUplink {
 public:
  MqttUplink(asio::io_context& io, mqtt::BrokerHost& local, UplinkConfig config, double now = 0);
  ~MqttUplink();
  MqttUplink(const MqttUplink&) = delete;
  MqttUplink& operator=(const MqttUplink&) = delete;

  void start();
  void stop();
  bool connected() const noexcept { return connected_; }
  mqtt::BridgeStats stats() const { return bridge_.stats(); }
  const UplinkConfig& config() const noexcept { return config_; }

 private:
  void connect();
  void on_connected();
  void read();
  void handle(const mqtt::MqttPacket& packet);
  void send(const mqtt::MqttPacket& packet);
  void write();
  void transmit(const mqtt::BridgeMessage& message);
  void fail();
  void schedule_ping();

  asio::io_context& io_;
  UplinkConfig config_;
  mqtt::Bridge bridge_;
  tcp::resolver resolver_;
  tcp::socket socket_;
  asio::steady_timer retry_;
  asio::steady_timer ping_;
  std::unique_ptr<mqtt::LocalClient> feed_;
  std::array<std::uint8_t, 4096> chunk_{};
  std::vector<std::uint8_t> inbox_;
  std::deque<std::vector<std::uint8_t>> outbox_;
  std::map<std::uint16_t, std::uint64_t> pending_;  // packet id -> bridge seq
  bool writing_ = false;
  bool connecting_ = false;
  bool connected_ = false;
  bool stopped_ = true;
  std::uint64_t generation_ = 0;  // bumps on every disconnect; stale handlers bail out
  std::shared_ptr<bool> alive_ = std::make_shared<bool>(true);
};

}  // namespace zgw::net
