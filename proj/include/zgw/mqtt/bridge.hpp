#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace zgw::mqtt {

struct BridgeMessage {
  std::uint64_t seq = 0;
  std::string topic;
  std::string payload;
  std::uint8_t qos = 1;
  bool retain = false;
};

struct BridgeConfig {
  std::size_t capacity = 10'000;
  std::size_t inflight_window = 16;
};

struct BridgeStats {
  std::uint64_t offered = 0;
  std::uint64_t sent = 0;
  std::uint64_t acked = 0;
  std::uint64_t dropped = 0;
  std::size_t buffered = 0;
  std::size_t inflight = 0;
  std::size_t high_water = 0;
  bool connected = false;
};

// Store-and-forward queue toward the fog broker. Unacknowledged messages stay
// buffered, so a lost uplink resends them after reconnecting. When the buffer
// is full the oldest message is dropped and counted.
//
// One producer (publish) and one pump side (pump, ack, up/down) may run on
// different threads. The sender is invoked outside the internal lock.
class Bridge {
 public:
  using Sender = std::function<void(const BridgeMessage&)>;

  Bridge(BridgeConfig config, Sender sender);

  std::uint64_t publish(std::string topic, std::string payload, std::uint8_t qos = 1, bool retain = false);
  // Sends queued messages while the uplink is up and the window allows.
  std::size_t pump();
  void ack(std::uint64_t seq);
  void uplink_up();
  void uplink_down();

  BridgeStats stats() const;
  const BridgeConfig& config() const noexcept { return config_; }

 private:
  struct Entry {
    BridgeMessage message;
    bool sent = false;
  };

  BridgeConfig config_;
  Sender sender_;
  mutable std::mutex mu_;
  // Sent entries always form a prefix of the queue.
  std::deque<Entry> queue_;
  std::size_t inflight_ = 0;
  bool connected_ = false;
  std::uint64_t next_seq_ = 1;
  BridgeStats stats_;
};

}  // namespace zgw::mqtt
