#include "zgw/net/uplink.hpp"

#include <chrono>

#include "zgw/mqtt/codec.hpp"

namespace zgw::net {

namespace {

std::chrono::steady_clock::duration seconds(double s) {
  return std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(s));
}

std::uint16_t packet_id_for(std::uint64_t seq) { return static_cast<std::uint16_t>((seq - 1) % 65535 + 1); }

}  // namespace

MqttUplink::MqttUplink(asio::io_context& io, mqtt::BrokerHost& local, UplinkConfig config, double now)
    : io_(io),
      config_(std::move(config)),
      bridge_(config_.buffer, [this](const mqtt::BridgeMessage& m) { transmit(m); }),
      resolver_(io),
      socket_(io),
      retry_(io),
      ping_(io) {
  feed_ = std::make_unique<mqtt::LocalClient>(
      local, config_.client_id + "-feed",
      [this](const mqtt::Publish& p) {
        bridge_.publish(p.topic, p.payload, 1, p.retain);
        bridge_.pump();
      },
      now);
  for (const auto& filter : config_.topics) feed_->subscribe(filter, 0, now);
}

MqttUplink::~MqttUplink() {
  *alive_ = false;
  stop();
}

void MqttUplink::start() {
  if (!stopped_) return;
  stopped_ = false;
  connect();
}

void MqttUplink::stop() {
  stopped_ = true;
  retry_.cancel();
  ping_.cancel();
  resolver_.cancel();
  boost::system::error_code ignored;
  socket_.close(ignored);
  if (connected_) bridge_.uplink_down();
  connected_ = false;
  connecting_ = false;
}

void MqttUplink::connect() {
  if (stopped_ || connecting_ || connected_) return;
  connecting_ = true;
  const auto gen = generation_;
  resolver_.async_resolve(
      config_.host, std::to_string(config_.port),
      [this, gen, alive = alive_](boost::system::error_code ec, tcp::resolver::results_type results) {
        if (!*alive || gen != generation_ || stopped_) return;
        if (ec) {
          fail();
          return;
        }
        asio::async_connect(socket_, results, [this, gen, alive](boost::system::error_code cec, const tcp::endpoint&) {
          if (!*alive || gen != generation_ || stopped_) return;
          if (cec) {
            fail();
            return;
          }
          mqtt::Connect c;
          c.client_id = config_.client_id;
          c.keepalive_s = config_.keepalive_s;
          c.clean_session = true;
          send(c);
          read();
        });
      });
}

void MqttUplink::read() {
  const auto gen = generation_;
  socket_.async_read_some(asio::buffer(chunk_), [this, gen, alive = alive_](boost::system::error_code ec,
                                                                             std::size_t n) {
    if (!*alive || gen != generation_) return;
    if (ec) {
      fail();
      return;
    }
    inbox_.insert(inbox_.end(), chunk_.begin(), chunk_.begin() + static_cast<long>(n));
    try {
      for (;;) {
        auto r = mqtt::decode_packet(inbox_);
        if (r.status == mqtt::DecodeStatus::NeedMoreData) break;
        inbox_.erase(inbox_.begin(), inbox_.begin() + static_cast<long>(r.consumed));
        handle(r.packet);
        if (gen != generation_) return;
      }
    } catch (const mqtt::MqttError&) {
      fail();
      return;
    }
    read();
  });
}

void MqttUplink::handle(const mqtt::MqttPacket& packet) {
  if (const auto* ack = std::get_if<mqtt::Connack>(&packet)) {
    if (ack->return_code != mqtt::connack::kAccepted) {
      fail();
      return;
    }
    on_connected();
  } else if (const auto* puback = std::get_if<mqtt::Puback>(&packet)) {
    if (auto it = pending_.find(puback->packet_id); it != pending_.end()) {
      const auto seq = it->second;
      pending_.erase(it);
      bridge_.ack(seq);
      bridge_.pump();
    }
  } else if (const auto* publish = std::get_if<mqtt::Publish>(&packet)) {
    // Nothing is subscribed upstream; acknowledge anything that arrives anyway.
    if (publish->qos == 1 && publish->packet_id) send(mqtt::Puback{*publish->packet_id});
  }
}

void MqttUplink::on_connected() {
  connecting_ = false;
  connected_ = true;
  schedule_ping();
  bridge_.uplink_up();
  bridge_.pump();
}

void MqttUplink::transmit(const mqtt::BridgeMessage& m) {
  mqtt::Publish p;
  p.topic = m.topic;
  p.payload = m.payload;
  p.qos = 1;
  p.retain = m.retain;
  p.packet_id = packet_id_for(m.seq);
  pending_[*p.packet_id] = m.seq;
  send(p);
}

void MqttUplink::send(const mqtt::MqttPacket& packet) {
  outbox_.push_back(mqtt::encode_packet(packet));
  if (!writing_) write();
}

void MqttUplink::write() {
  writing_ = true;
  const auto gen = generation_;
  asio::async_write(socket_, asio::buffer(outbox_.front()),
                    [this, gen, alive = alive_](boost::system::error_code ec, std::size_t) {
                      if (!*alive || gen != generation_) return;
                      outbox_.pop_front();
                      if (ec) {
                        writing_ = false;
                        fail();
                        return;
                      }
                      if (outbox_.empty()) {
                        writing_ = false;
                      } else {
                        write();
                      }
                    });
}

void MqttUplink::schedule_ping() {
  ping_.expires_after(seconds(config_.keepalive_s / 2.0));
  const auto gen = generation_;
  ping_.async_wait([this, gen, alive = alive_](boost::system::error_code ec) {
    if (ec || !*alive || gen != generation_ || !connected_) return;
    send(mqtt::Pingreq{});
    schedule_ping();
  });
}

void MqttUplink::fail() {
  ++generation_;
  boost::system::error_code ignored;
  socket_.close(ignored);
  socket_ = tcp::socket(io_);
  ping_.cancel();
  inbox_.clear();
  outbox_.clear();
  pending_.clear();
  writing_ = false;
  connecting_ = false;
  if (connected_) {
    connected_ = false;
    bridge_.uplink_down();
  }
  if (stopped_) return;
  retry_.expires_after(seconds(config_.retry_s));
  retry_.async_wait([this, alive = alive_](boost::system::error_code ec) {
    if (ec || !*alive) return;
    connect();
  });
}

}  // namespace zgw::net
