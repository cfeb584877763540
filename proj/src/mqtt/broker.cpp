#include "zgw/mqtt/broker.hpp"

#include <algorithm>

namespace zgw::mqtt {

Broker::Broker(BrokerConfig config) : config_(config) {}

SessionId Broker::open(double now) {
  const SessionId id = next_session_++;
  Session s;
  s.last_activity = now;
  sessions_.emplace(id, std::move(s));
  return id;
}

bool Broker::connected(SessionId session) const {
  auto it = sessions_.find(session);
  return it != sessions_.end() && it->second.connected;
}

std::optional<std::string> Broker::client_id(SessionId session) const {
  auto it = sessions_.find(session);
  if (it == sessions_.end() || !it->second.connected) return std::nullopt;
  return it->second.client_id;
}

std::optional<Publish> Broker::retained(const std::string& topic) const {
  auto it = retained_.find(topic);
  if (it == retained_.end()) return std::nullopt;
  return it->second;
}

std::size_t Broker::inflight(SessionId session) const {
  auto it = sessions_.find(session);
  return it == sessions_.end() ? 0 : it->second.inflight.size();
}

void Broker::drop_session(SessionId id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return;
  Session& s = it->second;
  stats_.messages_dropped += s.inflight.size();
  for (const auto& [filter, qos] : s.filters) {
    if (auto f = TopicFilter::parse(filter)) trie_.erase(*f, id);
  }
  if (s.connected) {
    auto owner = by_client_.find(s.client_id);
    if (owner != by_client_.end() && owner->second == id) by_client_.erase(owner);
  }
  sessions_.erase(it);
  stats_.sessions = by_client_.size();
}

void Broker::connection_lost(SessionId session) { drop_session(session); }

Actions Broker::on_connect(SessionId id, Session& s, const Connect& c) {
  Actions out;
  if (c.protocol_level != kProtocolLevel311) {
    out.push_back(SendAction{id, Connack{false, connack::kBadProtocolLevel}});
    out.push_back(CloseAction{id, "unsupported protocol level"});
    return out;
  }
  if (c.client_id.empty() && !c.clean_session) {
    out.push_back(SendAction{id, Connack{false, connack::kIdentifierRejected}});
    out.push_back(CloseAction{id, "empty client id requires clean session"});
    return out;
  }
  std::string client = c.client_id.empty() ? "auto-" + std::to_string(++auto_ids_) : c.client_id;
  // Session state is never persisted, so clean_session=0 behaves like a clean
  // session and session_present is always 0.
  if (auto old = by_client_.find(client); old != by_client_.end()) {
    const SessionId evicted = old->second;
    out.push_back(CloseAction{evicted, "session taken over by a new connection"});
    drop_session(evicted);
  }
  s.connected = true;
  s.client_id = client;
  s.keepalive_s = c.keepalive_s;
  by_client_[client] = id;
  stats_.sessions = by_client_.size();
  out.push_back(SendAction{id, Connack{false, connack::kAccepted}});
  return out;
}

void Broker::deliver(SessionId id, Session& s, Publish message, double now, Actions& out) {
  message.dup = false;
  if (message.qos > 0) {
    std::uint16_t pid = s.next_packet_id;
    while (s.inflight.count(pid) != 0 || pid == 0) ++pid;
    s.next_packet_id = static_cast<std::uint16_t>(pid + 1);
    message.packet_id = pid;
    s.inflight[pid] = Inflight{message, now};
  } else {
    message.packet_id.reset();
  }
  ++stats_.messages_sent;
  out.push_back(SendAction{id, std::move(message)});
}

void Broker::route(const Publish& message, double now, Actions& out) {
  if (message.retain) {
    if (message.payload.empty()) {
      retained_.erase(message.topic);
    } else {
      Publish stored = message;
      stored.dup = false;
      stored.packet_id.reset();
      retained_[message.topic] = std::move(stored);
    }
    stats_.retained = retained_.size();
  }
  for (const auto& [who, granted] : trie_.match(message.topic)) {
    auto it = sessions_.find(who);
    if (it == sessions_.end() || !it->second.connected) continue;
    Publish copy = message;
    copy.retain = false;
    copy.qos = std::min(message.qos, granted);
    deliver(who, it->second, std::move(copy), now, out);
  }
}

void Broker::on_subscribe(SessionId id, Session& s, const Subscribe& sub, double now, Actions& out) {
  Suback ack{sub.packet_id, {}};
  std::vector<std::pair<TopicFilter, std::uint8_t>> accepted;
  for (const auto& [text, requested] : sub.topics) {
    auto filter = TopicFilter::parse(text);
    if (!filter) {
      ack.return_codes.push_back(kSubackFailure);
      continue;
    }
    const std::uint8_t granted = std::min<std::uint8_t>(requested, 1);
    trie_.insert(*filter, id, granted);
    s.filters[text] = granted;
    ack.return_codes.push_back(granted);
    accepted.emplace_back(std::move(*filter), granted);
  }
  out.push_back(SendAction{id, std::move(ack)});
  for (const auto& [topic, message] : retained_) {
    std::optional<std::uint8_t> best;
    for (const auto& [filter, granted] : accepted) {
      if (topic_matches(filter, topic)) best = std::max(best.value_or(0), granted);
    }
    if (!best) continue;
    Publish copy = message;
    copy.retain = true;
    copy.qos = std::min(message.qos, *best);
    deliver(id, s, std::move(copy), now, out);
  }
}

Actions Broker::handle(SessionId id, const MqttPacket& packet, double now) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return {};
  Session& s = it->second;
  s.last_activity = now;
  Actions out;

  auto protocol_violation = [&](std::string reason) {
    out.push_back(CloseAction{id, std::move(reason)});
    drop_session(id);
    return out;
  };

  if (!s.connected) {
    if (const auto* c = std::get_if<Connect>(&packet)) {
      out = on_connect(id, s, *c);
      if (!out.empty() && std::holds_alternative<CloseAction>(out.back()) &&
          std::get<CloseAction>(out.back()).session == id) {
        drop_session(id);
      }
      return out;
    }
    return protocol_violation("first packet must be CONNECT");
  }

  return std::visit(
      [&](const auto& p) -> Actions {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Publish>) {
          ++stats_.messages_received;
          if (p.qos == 1) out.push_back(SendAction{id, Puback{*p.packet_id}});
          // Clients may not inject into the broker's own $ namespace.
          if (!p.topic.empty() && p.topic.front() == '$') return out;
          route(p, now, out);
          return out;
        } else if constexpr (std::is_same_v<T, Puback>) {
          s.inflight.erase(p.packet_id);
          return out;
        } else if constexpr (std::is_same_v<T, Subscribe>) {
          on_subscribe(id, s, p, now, out);
          return out;
        } else if constexpr (std::is_same_v<T, Unsubscribe>) {
          for (const auto& text : p.topics) {
            if (auto f = TopicFilter::parse(text)) trie_.erase(*f, id);
            s.filters.erase(text);
          }
          out.push_back(SendAction{id, Unsuback{p.packet_id}});
          return out;
        } else if constexpr (std::is_same_v<T, Pingreq>) {
          out.push_back(SendAction{id, Pingresp{}});
          return out;
        } else if constexpr (std::is_same_v<T, Disconnect>) {
          // Clean disconnect: nothing in flight counts as dropped.
          s.inflight.clear();
          out.push_back(CloseAction{id, "client disconnected"});
          drop_session(id);
          return out;
        } else if constexpr (std::is_same_v<T, Connect>) {
          return protocol_violation("second CONNECT on an open session");
        } else {
          return protocol_violation(std::string("unexpected ") + std::string(packet_name(packet)) + " from client");
        }
      },
      packet);
}

Actions Broker::advance(double now) {
  Actions out;
  std::vector<SessionId> expired;
  for (auto& [id, s] : sessions_) {
    if (s.connected && s.keepalive_s > 0 && now - s.last_activity > config_.keepalive_factor * s.keepalive_s) {
      expired.push_back(id);
      continue;
    }
    for (auto& [pid, entry] : s.inflight) {
      if (now - entry.last_sent >= config_.retransmit_s) {
        entry.last_sent = now;
        Publish again = entry.message;
        again.dup = true;
        ++stats_.retransmissions;
        ++stats_.messages_sent;
        out.push_back(SendAction{id, std::move(again)});
      }
    }
  }
  for (SessionId id : expired) {
    out.push_back(CloseAction{id, "keepalive timeout"});
    drop_session(id);
  }
  return out;
}

Actions Broker::publish_local(const Publish& message, double now) {
  Actions out;
  route(message, now, out);
  return out;
}

Actions Broker::publish_sys(double now) {
  Actions out;
  auto put = [&](const std::string& name, std::uint64_t value) {
    Publish p;
    p.topic = "$SYS/broker/" + name;
    p.payload = std::to_string(value);
    p.retain = true;
    route(p, now, out);
  };
  put("messages/received", stats_.messages_received);
  put("messages/sent", stats_.messages_sent);
  put("messages/dropped", stats_.messages_dropped);
  put("clients/connected", stats_.sessions);
  put("retained/count", stats_.retained);
  return out;
}

}  // namespace zgw::mqtt
