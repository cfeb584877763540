#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "zgw/mqtt/broker.hpp"

namespace zgw::mqtt {

// Where a session's outbound traffic goes: a socket writer or an in-process
// callback.
struct Sink {
  std::function<void(const MqttPacket&)> send;
  std::function<void(const std::string& reason)> close;
};

// Runs a Broker on behalf of any number of transports. All calls must come
// from one thread (the owner's event loop).
class BrokerHost {
 public:
  explicit BrokerHost(BrokerConfig config = {});

  SessionId attach(Sink sink, double now);
  void feed(SessionId session, const MqttPacket& packet, double now);
  void lost(SessionId session);
  void advance(double now);
  void publish(const Publish& message, double now);
  void publish_sys(double now);

  // Observers see every PUBLISH accepted from a client or published locally,
  // with the publisher's original flags.
  void on_publish(std::function<void(const Publish&, double)> observer) {
    observers_.push_back(std::move(observer));
  }

  Broker& broker() noexcept { return broker_; }
  const Broker& broker() const noexcept { return broker_; }

 private:
  void dispatch(Actions actions);
  void notify(const Publish& message, double now);

  Broker broker_;
  std::map<SessionId, Sink> sinks_;
  std::vector<std::function<void(const Publish&, double)>> observers_;
};

// In-process client attached directly to a BrokerHost. QoS 1 deliveries are
// acknowledged automatically once the handler returns.
class LocalClient {
 public:
  using Handler = std::function<void(const Publish&)>;

  LocalClient(BrokerHost& host, std::string client_id, Handler handler, double now = 0);
  ~LocalClient();
  LocalClient(const LocalClient&) = delete;
  LocalClient& operator=(const LocalClient&) = delete;

  void subscribe(const std::string& filter, std::uint8_t qos, double now);
  void publish(const std::string& topic, std::string payload, std::uint8_t qos, bool retain, double now);
  bool connected() const noexcept { return alive_ != nullptr && *alive_; }
  SessionId session() const noexcept { return session_; }

 private:
  BrokerHost& host_;
  Handler handler_;
  SessionId session_ = 0;
  std::uint16_t next_id_ = 1;
  std::shared_ptr<bool> alive_;
  double now_ = 0;
};

}  // namespace zgw::mqtt
