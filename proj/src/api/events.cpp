#include "zgw/api/events.hpp"

#include <vector>

#include "zgw/mqtt/topic.hpp"

namespace zgw::api {

using nlohmann::json;

std::string_view to_string(ApiEventType type) noexcept {
  switch (type) {
    case ApiEventType::DeviceJoined: return "device_joined";
    case ApiEventType::DeviceLeft: return "device_left";
    case ApiEventType::State: return "state";
    case ApiEventType::BridgeState: return "bridge_state";
    case ApiEventType::Log: return "log";
    case ApiEventType::Metric: return "metric";
  }
  return "log";
}

json to_json(const ApiEvent& event) {
  return {{"type", to_string(event.type)}, {"body", event.body}, {"t", event.t}};
}

std::optional<ApiEvent> classify(std::string_view base, const mqtt::Publish& message, double t) {
  const auto levels = mqtt::split_levels(message.topic);
  if (levels.size() < 2 || levels[0] != base) return std::nullopt;
  json body = json::parse(message.payload, nullptr, false);
  if (levels[1] == "bridge") {
    if (levels.size() != 3 || body.is_discarded()) return std::nullopt;
    if (levels[2] == "state") return ApiEvent{ApiEventType::BridgeState, body, t};
    if (levels[2] == "log") return ApiEvent{ApiEventType::Log, body, t};
    if (levels[2] == "metric") return ApiEvent{ApiEventType::Metric, body, t};
    if (levels[2] == "event") {
      const auto type = body.value("type", std::string{});
      if (type == "device_joined") return ApiEvent{ApiEventType::DeviceJoined, body, t};
      if (type == "device_left" || type == "device_removed") return ApiEvent{ApiEventType::DeviceLeft, body, t};
      return ApiEvent{ApiEventType::Log, body, t};
    }
    return std::nullopt;
  }
  if (levels.size() == 2) {
    if (message.payload.empty() || !body.is_object()) return std::nullopt;
    return ApiEvent{ApiEventType::State, {{"friendly_name", levels[1]}, {"state", body}}, t};
  }
  if (levels.size() == 4 && levels[2] == "set" && levels[3] == "result" && body.is_object()) {
    body["friendly_name"] = levels[1];
    if (!body.contains("type")) body["type"] = "command_result";
    return ApiEvent{ApiEventType::Log, body, t};
  }
  return std::nullopt;
}

EventHub::EventHub(mqtt::BrokerHost& host, std::string base) : base_(std::move(base)) {
  host.on_publish([this](const mqtt::Publish& p, double t) {
    if (auto event = classify(base_, p, t)) emit(*event);
  });
}

std::uint64_t EventHub::subscribe(Listener listener) {
  std::lock_guard lock(mutex_);
  const auto id = next_id_++;
  listeners_.emplace(id, std::move(listener));
  return id;
}

void EventHub::unsubscribe(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  listeners_.erase(id);
}

std::size_t EventHub::listeners() const {
  std::lock_guard lock(mutex_);
  return listeners_.size();
}

void EventHub::emit(const ApiEvent& event) {
  std::vector<Listener> targets;
  {
    std::lock_guard lock(mutex_);
    ++emitted_;
    for (const auto& [id, l] : listeners_) targets.push_back(l);
  }
  for (const auto& l : targets) l(event);
}

}  // namespace zgw::api
