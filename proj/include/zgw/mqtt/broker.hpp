#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zgw/mqtt/packet.hpp"
#include "zgw/mqtt/topic.hpp"

namespace zgw::mqtt {

using SessionId = std::uint64_t;

struct SendAction {
  SessionId session = 0;
  MqttPacket packet;
};

struct CloseAction {
  SessionId session = 0;
  std::string reason;
};

using Action = std::variant<SendAction, CloseAction>;
using Actions = std::vector<Action>;

struct BrokerConfig {
  double retransmit_s = 5.0;
  double keepalive_factor = 1.5;
};

struct BrokerStats {
  std::uint64_t messages_received = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_dropped = 0;
  std::uint64_t retransmissions = 0;
  std::size_t sessions = 0;
  std::size_t retained = 0;
};

// Single-owner protocol state machine. Transports feed decoded packets in and
// carry out the returned actions; nothing here touches sockets or clocks.
class Broker {
 public:
  explicit Broker(BrokerConfig config = {});

  SessionId open(double now);
  Actions handle(SessionId session, const MqttPacket& packet, double now);
  // Transport went away without DISCONNECT. Unacknowledged deliveries are
  // counted as dropped.
  void connection_lost(SessionId session);
  // Retransmits overdue QoS 1 deliveries and closes idle sessions.
  Actions advance(double now);
  // Publishes on behalf of the broker itself ($SYS counters and the like).
  Actions publish_local(const Publish& message, double now);
  Actions publish_sys(double now);

  const BrokerStats& stats() const noexcept { return stats_; }
  bool connected(SessionId session) const;
  std::optional<std::string> client_id(SessionId session) const;
  std::optional<Publish> retained(const std::string& topic) const;
  std::size_t inflight(SessionId session) const;

 private:
  struct Inflight {
    Publish message;
    double last_sent = 0;
  };
  struct Session {
    bool connected = false;
    std::string client_id;
    std::uint16_t keepalive_s = 0;
    double last_activity = 0;
    std::map<std::string, std::uint8_t> filters;
    std::map<std::uint16_t, Inflight> inflight;
    std::uint16_t next_packet_id = 1;
  };

  Actions on_connect(SessionId id, Session& s, const Connect& c);
  void on_subscribe(SessionId id, Session& s, const Subscribe& sub, double now, Actions& out);
  void route(const Publish& message, double now, Actions& out);
  void deliver(SessionId id, Session& s, Publish message, double now, Actions& out);
  void drop_session(SessionId id);

  BrokerConfig config_;
  SessionId next_session_ = 1;
  std::map<SessionId, Session> sessions_;
  std::map<std::string, SessionId> by_client_;
  SubscriptionTrie<SessionId> trie_;
  std::map<std::string, Publish> retained_;
  std::uint64_t auto_ids_ = 0;
  BrokerStats stats_;
};

}  // namespace zgw::mqtt
