#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "zgw/mqtt/host.hpp"

namespace zgw::api {

enum class ApiEventType { DeviceJoined, DeviceLeft, State, BridgeState, Log, Metric };

std::string_view to_string(ApiEventType type) noexcept;

struct ApiEvent {
  ApiEventType type = ApiEventType::Log;
  nlohmann::json body;
  double t = 0;
};

nlohmann::json to_json(const ApiEvent& event);

// Maps a publish under <base>/ to the event it stands for. Commands
// (<base>/<name>/set), retained-state clears and $SYS traffic map to nothing.
std::optional<ApiEvent> classify(std::string_view base, const mqtt::Publish& message, double t);

// Fans classified broker publishes out to subscribers in publish order.
// Subscribers are called on the broker's thread.
class EventHub {
 public:
  using Listener = std::function<void(const ApiEvent&)>;

  EventHub(mqtt::BrokerHost& host, std::string base);
  EventHub(const EventHub&) = delete;
  EventHub& operator=(const EventHub&) = delete;

  std::uint64_t subscribe(Listener listener);
  void unsubscribe(std::uint64_t id);
  std::size_t listeners() const;
  std::uint64_t emitted() const noexcept { return emitted_; }

 private:
  void emit(const ApiEvent& event);

  std::string base_;
  mutable std::mutex mutex_;
  std::map<std::uint64_t, Listener> listeners_;
  std::uint64_t next_id_ = 1;
  std::uint64_t emitted_ = 0;
};

}  // namespace zgw::api
