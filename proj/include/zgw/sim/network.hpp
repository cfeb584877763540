#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include "zgw/install_code/credential.hpp"
#include "zgw/sim/event.hpp"
#include "zgw/sim/radio.hpp"
#include "zgw/sim/types.hpp"

namespace zgw::sim {

struct PendingConfig {
  std::size_t capacity = 8;
  double expiry_s = 7.68;
};

struct NetworkConfig {
  std::uint64_t seed = 1;
  RadioModel radio;
  PendingConfig pending;
  std::vector<Wall> walls;
  // Exactly one entry must be the coordinator; the rest start unjoined.
  std::vector<NodeConfig> nodes;
  // Keep emitted events in memory. Long runs stream them through a listener.
  bool retain_events = true;
};

enum class JoinStatus {
  Joined,
  PermitJoinClosed,
  KeyMismatch,
  NotRegistered,
  NoParentInRange,
  AlreadyJoined,
};

std::string_view to_string(JoinStatus status) noexcept;

struct JoinOutcome {
  JoinStatus status = JoinStatus::Joined;
  std::optional<ShortAddr> short_addr;
  std::optional<ShortAddr> parent;
};

enum class DeliveryStatus { Delivered, Queued };

struct DeliveryResult {
  DeliveryStatus status = DeliveryStatus::Delivered;
  std::uint64_t frame_id = 0;
};

struct DeliveryStats {
  std::uint64_t created = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t expired = 0;
  std::uint64_t pending = 0;
};

class Network {
 public:
  using Listener = std::function<void(const SimEvent&)>;
  using Callback = std::function<void()>;

  // Throws SimError(InvalidTopology) unless exactly one coordinator is given.
  static Network form(NetworkConfig config);

  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  void add_node(const NodeConfig& config);

  // Trust Center registry, filled out of band before joining.
  void register_credential(IeeeAddr ieee, const install_code::Credential& cred);
  void register_key(IeeeAddr ieee, const install_code::LinkKey& key);
  std::optional<install_code::LinkKey> registered_key(IeeeAddr ieee) const;

  void permit_join(double duration_s);
  bool permit_join_open() const noexcept;
  std::optional<double> permit_join_until() const noexcept;

  JoinOutcome join(IeeeAddr ieee, const install_code::LinkKey& presented_key);
  void leave(IeeeAddr ieee);
  void set_position(IeeeAddr ieee, Position position);

  // Shortest hop path; EndDevices only appear as endpoints and only talk to
  // their parent. Ties: larger bottleneck LQI, then lexicographically lowest
  // address sequence. Throws Unreachable.
  std::vector<ShortAddr> route(ShortAddr src, ShortAddr dst) const;

  DeliveryResult deliver(Frame frame);

  // Advances the clock by dt_s, firing due polls, expiries, the permit-join
  // closure and scheduled callbacks in (time, scheduling order). Returns the
  // events emitted during the tick.
  std::vector<SimEvent> tick(double dt_s);

  void schedule_at(double t, Callback callback);

  void subscribe(Listener listener);

  double now() const noexcept { return now_; }
  std::uint64_t seed() const noexcept { return config_.seed; }
  const RadioModel& radio() const noexcept { return config_.radio; }
  const std::vector<SimEvent>& events() const noexcept { return events_; }
  const DeliveryStats& stats() const noexcept { return stats_; }

  const Node& node(IeeeAddr ieee) const;
  const Node* find(ShortAddr addr) const noexcept;
  std::vector<const Node*> nodes() const;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t pending_count(ShortAddr child) const noexcept;

  // Noise-free link metrics between two nodes, from positions and walls.
  Link link_between(const Node& a, const Node& b) const noexcept;
  // Links among joined nodes.
  std::vector<Link> links() const;

 private:
  explicit Network(NetworkConfig config);

  struct Pending {
    Frame frame;
    double enqueued_at = 0.0;
  };

  enum class TimerKind { Poll, Expire, ClosePermitJoin, Callback };

  // Internal timers carry data rather than closures over `this`, so a
  // Network stays movable while timers are armed.
  struct Timer {
    double t = 0.0;
    std::uint64_t seq = 0;
    TimerKind kind = TimerKind::Callback;
    IeeeAddr ieee;
    ShortAddr child;
    std::uint64_t id = 0;
    Callback fn;
  };
  struct TimerLater {
    bool operator()(const Timer& a, const Timer& b) const noexcept {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };

  Node& node_mut(IeeeAddr ieee);
  Node* find_mut(ShortAddr addr) noexcept;
  bool usable(const Node& a, const Node& b) const noexcept;
  bool can_route_through(const Node& n) const noexcept;
  int noisy_lqi(const Node& from, const Node& to);
  void emit(SimEvent event);
  void push_timer(Timer timer);
  void schedule_poll(IeeeAddr ieee, double t);
  void poll(IeeeAddr ieee);
  void expire(ShortAddr child, std::uint64_t frame_id);
  void close_permit_join(std::uint64_t generation);
  void finish_delivery(Frame& frame, const Node& last_hop_from, const Node& receiver);

  NetworkConfig config_;
  std::map<IeeeAddr, Node> nodes_;
  std::map<ShortAddr, IeeeAddr> by_short_;
  std::map<IeeeAddr, install_code::LinkKey> registry_;
  std::map<ShortAddr, std::deque<Pending>> pending_;
  std::map<IeeeAddr, std::uint64_t> poll_generation_;
  std::optional<double> permit_until_;
  std::uint64_t permit_generation_ = 0;
  double now_ = 0.0;
  std::mt19937_64 rng_;
  std::priority_queue<Timer, std::vector<Timer>, TimerLater> timers_;
  std::uint64_t timer_seq_ = 0;
  std::uint64_t next_frame_id_ = 1;
  std::vector<SimEvent> events_;
  std::vector<SimEvent>* tick_sink_ = nullptr;
  std::vector<Listener> listeners_;
  DeliveryStats stats_;
};

}  // namespace zgw::sim
