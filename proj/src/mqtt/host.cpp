#include "zgw/mqtt/host.hpp"

namespace zgw::mqtt {

BrokerHost::BrokerHost(BrokerConfig config) : broker_(config) {}

SessionId BrokerHost::attach(Sink sink, double now) {
  const SessionId id = broker_.open(now);
  sinks_.emplace(id, std::move(sink));
  return id;
}

void BrokerHost::dispatch(Actions actions) {
  // Sinks may call back into the host; each action re-checks that its
  // session still exists.
  for (auto& action : actions) {
    if (auto* send = std::get_if<SendAction>(&action)) {
      auto it = sinks_.find(send->session);
      if (it != sinks_.end() && it->second.send) {
        auto fn = it->second.send;
        fn(send->packet);
      }
    } else {
      auto& close = std::get<CloseAction>(action);
      auto it = sinks_.find(close.session);
      if (it == sinks_.end()) continue;
      Sink sink = std::move(it->second);
      sinks_.erase(it);
      if (sink.close) sink.close(close.reason);
    }
  }
}

void BrokerHost::feed(SessionId session, const MqttPacket& packet, double now) {
  const bool accepted_publish = std::holds_alternative<Publish>(packet) && broker_.connected(session);
  Actions actions = broker_.handle(session, packet, now);
  if (accepted_publish) notify(std::get<Publish>(packet), now);
  dispatch(std::move(actions));
}

void BrokerHost::notify(const Publish& message, double now) {
  for (const auto& observer : observers_) observer(message, now);
}

void BrokerHost::lost(SessionId session) {
  broker_.connection_lost(session);
  sinks_.erase(session);
}

void BrokerHost::advance(double now) { dispatch(broker_.advance(now)); }

void BrokerHost::publish(const Publish& message, double now) {
  Actions actions = broker_.publish_local(message, now);
  notify(message, now);
  dispatch(std::move(actions));
}

void BrokerHost::publish_sys(double now) { dispatch(broker_.publish_sys(now)); }

LocalClient::LocalClient(BrokerHost& host, std::string client_id, Handler handler, double now)
    : host_(host), handler_(std::move(handler)), alive_(std::make_shared<bool>(true)), now_(now) {
  std::weak_ptr<bool> alive = alive_;
  Sink sink;
  sink.send = [this, alive](const MqttPacket& packet) {
    if (alive.expired()) return;
    const auto* pub = std::get_if<Publish>(&packet);
    if (pub == nullptr) return;
    if (handler_) handler_(*pub);
    if (pub->qos == 1 && !alive.expired() && *alive.lock()) host_.feed(session_, Puback{*pub->packet_id}, now_);
  };
  sink.close = [alive](const std::string&) {
    if (auto a = alive.lock()) *a = false;
  };
  session_ = host_.attach(std::move(sink), now);
  Connect c;
  c.client_id = std::move(client_id);
  c.keepalive_s = 0;
  host_.feed(session_, c, now);
}

LocalClient::~LocalClient() {
  if (connected()) host_.feed(session_, Disconnect{}, now_);
  alive_.reset();
}

void LocalClient::subscribe(const std::string& filter, std::uint8_t qos, double now) {
  now_ = now;
  Subscribe s;
  s.packet_id = next_id_++;
  if (next_id_ == 0) next_id_ = 1;
  s.topics.emplace_back(filter, qos);
  host_.feed(session_, s, now);
}

void LocalClient::publish(const std::string& topic, std::string payload, std::uint8_t qos, bool retain,
                          double now) {
  now_ = now;
  Publish p;
  p.topic = topic;
  p.payload = std::move(payload);
  p.qos = qos;
  p.retain = retain;
  if (qos > 0) {
    p.packet_id = next_id_++;
    if (next_id_ == 0) next_id_ = 1;
  }
  host_.feed(session_, p, now);
}

}  // namespace zgw::mqtt
