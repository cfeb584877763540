#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "zgw/sim/types.hpp"

namespace zgw::sim {

enum class EventKind {
  NetworkFormed,
  PermitJoinOpened,
  PermitJoinClosed,
  DeviceJoined,
  JoinRejected,
  DeviceLeft,
  NodeMoved,
  FrameDelivered,
  FrameQueued,
  DroppedPending,
  FrameExpired,
  Poll,
  PollFailed,
};

std::string_view to_string(EventKind kind) noexcept;

struct SimEvent {
  double t = 0.0;
  EventKind kind = EventKind::NetworkFormed;
  std::optional<IeeeAddr> ieee;
  std::optional<ShortAddr> short_addr;
  std::optional<ShortAddr> parent;
  std::optional<Frame> frame;
  std::optional<double> until;
  std::string model_id;
  std::string reason;
};

// {t, event, ...fields}; one line of the NDJSON event log.
nlohmann::json to_json(const SimEvent& event);

}  // namespace zgw::sim
