#include "zgw/mqtt/bridge.hpp"

#include <algorithm>

namespace zgw::mqtt {

Bridge::Bridge(BridgeConfig config, Sender sender) : config_(config), sender_(std::move(sender)) {
  if (config_.capacity == 0) config_.capacity = 1;
  if (config_.inflight_window == 0) config_.inflight_window = 1;
}

std::uint64_t Bridge::publish(std::string topic, std::string payload, std::uint8_t qos, bool retain) {
  std::lock_guard lock(mu_);
  const std::uint64_t seq = next_seq_++;
  ++stats_.offered;
  if (queue_.size() == config_.capacity) {
    if (queue_.front().sent) --inflight_;
    queue_.pop_front();
    ++stats_.dropped;
  }
  queue_.push_back(Entry{BridgeMessage{seq, std::move(topic), std::move(payload), qos, retain}, false});
  stats_.high_water = std::max(stats_.high_water, queue_.size());
  return seq;
}

std::size_t Bridge::pump() {
  std::vector<BridgeMessage> batch;
  {
    std::lock_guard lock(mu_);
    if (!connected_) return 0;
    while (inflight_ < config_.inflight_window && inflight_ < queue_.size()) {
      Entry& e = queue_[inflight_];
      e.sent = true;
      ++inflight_;
      batch.push_back(e.message);
    }
    stats_.sent += batch.size();
  }
  for (const auto& m : batch) sender_(m);
  return batch.size();
}

void Bridge::ack(std::uint64_t seq) {
  std::lock_guard lock(mu_);
  auto it = std::find_if(queue_.begin(), queue_.end(), [&](const Entry& e) { return e.message.seq == seq; });
  if (it == queue_.end()) return;
  if (it->sent) --inflight_;
  queue_.erase(it);
  ++stats_.acked;
}

void Bridge::uplink_up() {
  std::lock_guard lock(mu_);
  connected_ = true;
}

void Bridge::uplink_down() {
  std::lock_guard lock(mu_);
  connected_ = false;
  for (std::size_t i = 0; i < inflight_; ++i) queue_[i].sent = false;
  inflight_ = 0;
}

BridgeStats Bridge::stats() const {
  std::lock_guard lock(mu_);
  BridgeStats s = stats_;
  s.buffered = queue_.size();
  s.inflight = inflight_;
  s.connected = connected_;
  return s;
}

}  // namespace zgw::mqtt
