#include "zgw/sim/event.hpp"

namespace zgw::sim {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::NetworkFormed: return "network_formed";
    case EventKind::PermitJoinOpened: return "permit_join_opened";
    case EventKind::PermitJoinClosed: return "permit_join_closed";
    case EventKind::DeviceJoined: return "device_joined";
    case EventKind::JoinRejected: return "join_rejected";
    case EventKind::DeviceLeft: return "device_left";
    case EventKind::NodeMoved: return "node_moved";
    case EventKind::FrameDelivered: return "frame_delivered";
    case EventKind::FrameQueued: return "frame_queued";
    case EventKind::DroppedPending: return "dropped_pending";
    case EventKind::FrameExpired: return "frame_expired";
    case EventKind::Poll: return "poll";
    case EventKind::PollFailed: return "poll_failed";
  }
  return "unknown";
}

namespace {

nlohmann::json raw_to_json(const RawValue& v) {
  return std::visit([](auto x) { return nlohmann::json(x); }, v);
}

}  // namespace

nlohmann::json to_json(const SimEvent& e) {
  nlohmann::json j;
  j["t"] = e.t;
  j["event"] = to_string(e.kind);
  if (e.ieee) j["ieee"] = e.ieee->str();
  if (e.short_addr) j["short_addr"] = e.short_addr->str();
  if (e.parent) j["parent"] = e.parent->str();
  if (e.until) j["until"] = *e.until;
  if (!e.model_id.empty()) j["model_id"] = e.model_id;
  if (!e.reason.empty()) j["reason"] = e.reason;
  if (e.frame) {
    const auto& f = *e.frame;
    nlohmann::json fj;
    fj["id"] = f.id;
    fj["src"] = f.src.str();
    fj["dst"] = f.dst.str();
    fj["cluster"] = f.cluster_id;
    fj["kind"] = f.kind == FrameKind::Report ? "report" : "write";
    fj["lqi"] = f.lqi_at_receiver;
    auto hops = nlohmann::json::array();
    for (auto h : f.hops) hops.push_back(h.str());
    fj["hops"] = std::move(hops);
    auto attrs = nlohmann::json::array();
    for (const auto& a : f.attributes) {
      attrs.push_back({{"cluster", a.cluster_id}, {"attribute", a.attribute_id}, {"value", raw_to_json(a.raw_value)}});
    }
    fj["attributes"] = std::move(attrs);
    if (f.transaction) fj["transaction"] = f.transaction;
    j["frame"] = std::move(fj);
  }
  return j;
}

}  // namespace zgw::sim
