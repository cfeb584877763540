#include "zgw/sim/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zgw::sim {

std::string_view to_string(JoinStatus status) noexcept {
  switch (status) {
    case JoinStatus::Joined: return "Joined";
    case JoinStatus::PermitJoinClosed: return "PermitJoinClosed";
    case JoinStatus::KeyMismatch: return "KeyMismatch";
    case JoinStatus::NotRegistered: return "NotRegistered";
    case JoinStatus::NoParentInRange: return "NoParentInRange";
    case JoinStatus::AlreadyJoined: return "AlreadyJoined";
  }
  return "Unknown";
}

namespace {

void validate_node(const NodeConfig& cfg) {
  if (cfg.sleepy && cfg.role != Role::EndDevice) {
    throw SimError(SimErrc::InvalidTopology, "only end devices sleep: " + cfg.ieee.str());
  }
  if (cfg.sleepy && !(cfg.poll_interval_s > 0.0)) {
    throw SimError(SimErrc::InvalidTopology, "sleepy device needs a poll interval: " + cfg.ieee.str());
  }
}

}  // namespace

Network::Network(NetworkConfig config) : config_(std::move(config)), rng_(config_.seed) {}

Network Network::form(NetworkConfig config) {
  const auto coordinators = std::count_if(config.nodes.begin(), config.nodes.end(),
                                          [](const NodeConfig& n) { return n.role == Role::Coordinator; });
  if (coordinators != 1) {
    throw SimError(SimErrc::InvalidTopology,
                   "expected exactly one coordinator, got " + std::to_string(coordinators));
  }
  auto node_configs = std::move(config.nodes);
  config.nodes.clear();
  Network net(std::move(config));
  for (const auto& cfg : node_configs) {
    if (cfg.role != Role::Coordinator) continue;
    validate_node(cfg);
    Node node{cfg, kCoordinatorAddr, std::nullopt, 0.0};
    net.nodes_.emplace(cfg.ieee, node);
    net.by_short_.emplace(kCoordinatorAddr, cfg.ieee);
    SimEvent e;
    e.kind = EventKind::NetworkFormed;
    e.ieee = cfg.ieee;
    e.short_addr = kCoordinatorAddr;
    net.emit(std::move(e));
  }
  for (const auto& cfg : node_configs) {
    if (cfg.role != Role::Coordinator) net.add_node(cfg);
  }
  return net;
}

void Network::add_node(const NodeConfig& config) {
  if (config.role == Role::Coordinator) {
    throw SimError(SimErrc::InvalidTopology, "network already has a coordinator");
  }
  validate_node(config);
  if (nodes_.contains(config.ieee)) throw SimError(SimErrc::DuplicateNode, config.ieee.str());
  nodes_.emplace(config.ieee, Node{config, std::nullopt, std::nullopt, 0.0});
}

void Network::register_credential(IeeeAddr ieee, const install_code::Credential& cred) {
  register_key(ieee, install_code::derive_link_key(cred));
}

void Network::register_key(IeeeAddr ieee, const install_code::LinkKey& key) { registry_[ieee] = key; }

std::optional<install_code::LinkKey> Network::registered_key(IeeeAddr ieee) const {
  auto it = registry_.find(ieee);
  if (it == registry_.end()) return std::nullopt;
  return it->second;
}

void Network::permit_join(double duration_s) {
  if (!(duration_s >= 0.0 && duration_s <= 254.0)) {
    throw SimError(SimErrc::DurationOutOfRange, std::to_string(duration_s));
  }
  ++permit_generation_;
  SimEvent e;
  if (duration_s == 0.0) {
    permit_until_.reset();
    e.kind = EventKind::PermitJoinClosed;
    emit(std::move(e));
    return;
  }
  permit_until_ = now_ + duration_s;
  Timer t;
  t.t = *permit_until_;
  t.kind = TimerKind::ClosePermitJoin;
  t.id = permit_generation_;
  push_timer(std::move(t));
  e.kind = EventKind::PermitJoinOpened;
  e.until = permit_until_;
  emit(std::move(e));
}

bool Network::permit_join_open() const noexcept { return permit_until_ && now_ < *permit_until_; }

std::optional<double> Network::permit_join_until() const noexcept {
  return permit_join_open() ? permit_until_ : std::nullopt;
}

void Network::close_permit_join(std::uint64_t generation) {
  if (generation != permit_generation_ || !permit_until_) return;
  permit_until_.reset();
  SimEvent e;
  e.kind = EventKind::PermitJoinClosed;
  emit(std::move(e));
}

JoinOutcome Network::join(IeeeAddr ieee, const install_code::LinkKey& presented_key) {
  Node& node = node_mut(ieee);
  auto reject = [&](JoinStatus status) {
    SimEvent e;
    e.kind = EventKind::JoinRejected;
    e.ieee = ieee;
    e.reason = std::string(to_string(status));
    emit(std::move(e));
    return JoinOutcome{status, std::nullopt, std::nullopt};
  };
  if (node.joined()) return reject(JoinStatus::AlreadyJoined);
  if (!permit_join_open()) return reject(JoinStatus::PermitJoinClosed);
  auto reg = registry_.find(ieee);
  if (reg == registry_.end()) return reject(JoinStatus::NotRegistered);
  if (!(reg->second == presented_key)) return reject(JoinStatus::KeyMismatch);

  const Node* best = nullptr;
  int best_lqi = 0;
  for (const auto& [addr, owner] : by_short_) {
    const Node& candidate = nodes_.at(owner);
    if (candidate.config.role == Role::EndDevice) continue;
    const int lqi = link_between(node, candidate).lqi;
    if (lqi > best_lqi) {
      best = &candidate;
      best_lqi = lqi;
    }
  }
  if (!best) return reject(JoinStatus::NoParentInRange);

  ShortAddr addr{0x0001};
  while (by_short_.contains(addr)) ++addr.value;
  node.short_addr = addr;
  node.parent = best->short_addr;
  node.joined_at = now_;
  by_short_.emplace(addr, ieee);

  SimEvent e;
  e.kind = EventKind::DeviceJoined;
  e.ieee = ieee;
  e.short_addr = addr;
  e.parent = node.parent;
  e.model_id = node.config.model_id;
  emit(std::move(e));

  if (node.config.sleepy) schedule_poll(ieee, now_ + node.config.poll_interval_s);
  return JoinOutcome{JoinStatus::Joined, addr, node.parent};
}

void Network::leave(IeeeAddr ieee) {
  Node& node = node_mut(ieee);
  if (!node.joined()) throw SimError(SimErrc::NotJoined, ieee.str());
  if (node.short_addr == kCoordinatorAddr) {
    throw SimError(SimErrc::InvalidArgument, "the coordinator cannot leave");
  }
  const ShortAddr addr = *node.short_addr;

  std::vector<IeeeAddr> children;
  for (const auto& [other_ieee, other] : nodes_) {
    if (other.joined() && other.parent == addr) children.push_back(other_ieee);
  }
  for (auto child : children) leave(child);

  if (auto it = pending_.find(addr); it != pending_.end()) {
    auto queue = std::move(it->second);
    pending_.erase(it);
    for (auto& p : queue) {
      --stats_.pending;
      ++stats_.dropped;
      SimEvent e;
      e.kind = EventKind::DroppedPending;
      e.frame = std::move(p.frame);
      e.reason = "device_left";
      emit(std::move(e));
    }
  }

  by_short_.erase(addr);
  ++poll_generation_[ieee];
  node.short_addr.reset();
  node.parent.reset();
  SimEvent e;
  e.kind = EventKind::DeviceLeft;
  e.ieee = ieee;
  e.short_addr = addr;
  emit(std::move(e));
}

void Network::set_position(IeeeAddr ieee, Position position) {
  node_mut(ieee).config.position = position;
  SimEvent e;
  e.kind = EventKind::NodeMoved;
  e.ieee = ieee;
  e.reason = "(" + std::to_string(position.x) + ", " + std::to_string(position.y) + ")";
  emit(std::move(e));
}

Link Network::link_between(const Node& a, const Node& b) const noexcept {
  Link link;
  link.a = a.short_addr.value_or(ShortAddr{0xFFFF});
  link.b = b.short_addr.value_or(ShortAddr{0xFFFF});
  link.distance_m = distance(a.config.position, b.config.position);
  link.walls = count_wall_crossings(a.config.position, b.config.position, config_.walls);
  link.lqi = compute_lqi(config_.radio, link.distance_m, link.walls, 0.0);
  return link;
}

std::vector<Link> Network::links() const {
  std::vector<Link> out;
  for (auto i = by_short_.begin(); i != by_short_.end(); ++i) {
    for (auto j = std::next(i); j != by_short_.end(); ++j) {
      out.push_back(link_between(nodes_.at(i->second), nodes_.at(j->second)));
    }
  }
  return out;
}

bool Network::usable(const Node& a, const Node& b) const noexcept {
  if (a.config.role == Role::EndDevice && a.parent != b.short_addr) return false;
  if (b.config.role == Role::EndDevice && b.parent != a.short_addr) return false;
  return link_between(a, b).lqi > 0;
}

bool Network::can_route_through(const Node& n) const noexcept {
  return n.config.role != Role::EndDevice;
}

std::vector<ShortAddr> Network::route(ShortAddr src, ShortAddr dst) const {
  const Node* s = find(src);
  const Node* d = find(dst);
  if (!s || !d) {
    throw SimError(SimErrc::Unreachable, src.str() + " -> " + dst.str() + " (not joined)");
  }
  if (src == dst) return {src};

  std::vector<const Node*> joined;
  std::map<ShortAddr, std::size_t> index;
  for (const auto& [addr, ieee] : by_short_) {
    index[addr] = joined.size();
    joined.push_back(&nodes_.at(ieee));
  }
  const std::size_t n = joined.size();
  std::vector<std::vector<int>> lqi(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (usable(*joined[i], *joined[j])) {
        lqi[i][j] = lqi[j][i] = link_between(*joined[i], *joined[j]).lqi;
      }
    }
  }

  constexpr int kUnset = -1;
  const std::size_t si = index.at(src);
  const std::size_t di = index.at(dst);
  std::vector<int> dist(n, kUnset);
  std::vector<std::size_t> order;
  dist[di] = 0;
  order.push_back(di);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const std::size_t x = order[head];
    if (x != di && !can_route_through(*joined[x])) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (lqi[x][y] > 0 && dist[y] == kUnset) {
        dist[y] = dist[x] + 1;
        order.push_back(y);
      }
    }
  }
  if (dist[si] == kUnset) throw SimError(SimErrc::Unreachable, src.str() + " -> " + dst.str());

  // Best bottleneck LQI from each node to dst along shortest paths.
  auto step_ok = [&](std::size_t from, std::size_t to) {
    return lqi[from][to] > 0 && dist[to] == dist[from] - 1 && (to == di || can_route_through(*joined[to]));
  };
  std::vector<int> bottleneck(n, 0);
  bottleneck[di] = std::numeric_limits<int>::max();
  for (std::size_t x : order) {
    if (x == di) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (step_ok(x, y)) bottleneck[x] = std::max(bottleneck[x], std::min(lqi[x][y], bottleneck[y]));
    }
  }

  const int target = bottleneck[si];
  std::vector<ShortAddr> path{src};
  std::size_t at = si;
  while (at != di) {
    // `joined` is ordered by address, so the first admissible hop is the lowest.
    for (std::size_t y = 0; y < n; ++y) {
      if (step_ok(at, y) && lqi[at][y] >= target && bottleneck[y] >= target) {
        at = y;
        break;
      }
    }
    path.push_back(*joined[at]->short_addr);
  }
  return path;
}

int Network::noisy_lqi(const Node& from, const Node& to) {
  const Link base = link_between(from, to);
  double eps = 0.0;
  const double amp = config_.radio.noise_amplitude;
  if (amp > 0.0) eps = std::uniform_real_distribution<double>(-amp, amp)(rng_);
  const int lqi = compute_lqi(config_.radio, base.distance_m, base.walls, eps);
  // A usable link never reports zero on a received frame.
  return base.lqi > 0 ? std::max(1, lqi) : lqi;
}

void Network::finish_delivery(Frame& frame, const Node& last_hop_from, const Node& receiver) {
  frame.lqi_at_receiver = noisy_lqi(last_hop_from, receiver);
  ++stats_.delivered;
  SimEvent e;
  e.kind = EventKind::FrameDelivered;
  e.ieee = receiver.config.ieee;
  e.short_addr = receiver.short_addr;
  e.frame = std::move(frame);
  emit(std::move(e));
}

DeliveryResult Network::deliver(Frame frame) {
  const Node* src = find(frame.src);
  if (!src) throw SimError(SimErrc::NotJoined, "source " + frame.src.str());
  auto path = route(frame.src, frame.dst);
  const Node* dst = find(frame.dst);

  frame.id = next_frame_id_++;
  frame.hops = path;
  ++stats_.created;
  const DeliveryResult result{dst->config.sleepy && path.size() > 1 ? DeliveryStatus::Queued
                                                                     : DeliveryStatus::Delivered,
                              frame.id};

  if (result.status == DeliveryStatus::Queued) {
    auto& queue = pending_[frame.dst];
    if (queue.size() >= config_.pending.capacity) {
      ++stats_.dropped;
      --stats_.pending;
      SimEvent dropped;
      dropped.kind = EventKind::DroppedPending;
      dropped.frame = std::move(queue.front().frame);
      dropped.reason = "queue_full";
      queue.pop_front();
      emit(std::move(dropped));
    }
    ++stats_.pending;
    queue.push_back(Pending{frame, now_});
    Timer t;
    t.t = now_ + config_.pending.expiry_s;
    t.kind = TimerKind::Expire;
    t.child = frame.dst;
    t.id = frame.id;
    push_timer(std::move(t));
    SimEvent e;
    e.kind = EventKind::FrameQueued;
    e.short_addr = frame.dst;
    e.frame = std::move(frame);
    emit(std::move(e));
    return result;
  }

  const Node* from = path.size() > 1 ? find(path[path.size() - 2]) : src;
  finish_delivery(frame, *from, *dst);
  return result;
}

void Network::expire(ShortAddr child, std::uint64_t frame_id) {
  auto it = pending_.find(child);
  if (it == pending_.end()) return;
  auto& queue = it->second;
  auto pos = std::find_if(queue.begin(), queue.end(), [&](const Pending& p) { return p.frame.id == frame_id; });
  if (pos == queue.end()) return;
  SimEvent e;
  e.kind = EventKind::FrameExpired;
  e.short_addr = child;
  e.frame = std::move(pos->frame);
  queue.erase(pos);
  --stats_.pending;
  ++stats_.expired;
  emit(std::move(e));
}

void Network::schedule_poll(IeeeAddr ieee, double t) {
  Timer timer;
  timer.t = t;
  timer.kind = TimerKind::Poll;
  timer.ieee = ieee;
  timer.id = poll_generation_[ieee];
  push_timer(std::move(timer));
}

void Network::poll(IeeeAddr ieee) {
  Node& node = node_mut(ieee);
  if (!node.joined() || !node.config.sleepy) return;
  const ShortAddr addr = *node.short_addr;
  schedule_poll(ieee, now_ + node.config.poll_interval_s);

  const Node* parent = node.parent ? find(*node.parent) : nullptr;
  SimEvent e;
  e.ieee = ieee;
  e.short_addr = addr;
  if (!parent || link_between(node, *parent).lqi == 0) {
    e.kind = EventKind::PollFailed;
    emit(std::move(e));
    return;
  }
  e.kind = EventKind::Poll;
  emit(std::move(e));

  auto it = pending_.find(addr);
  if (it == pending_.end() || it->second.empty()) return;
  auto queue = std::move(it->second);
  it->second.clear();
  for (auto& p : queue) {
    --stats_.pending;
    finish_delivery(p.frame, *parent, node);
  }
}

void Network::push_timer(Timer timer) {
  timer.seq = timer_seq_++;
  timers_.push(std::move(timer));
}

void Network::schedule_at(double t, Callback callback) {
  Timer timer;
  timer.t = t;
  timer.kind = TimerKind::Callback;
  timer.fn = std::move(callback);
  push_timer(std::move(timer));
}

std::vector<SimEvent> Network::tick(double dt_s) {
  if (!(dt_s > 0.0)) throw SimError(SimErrc::InvalidArgument, "tick needs dt > 0");
  if (tick_sink_) throw SimError(SimErrc::InvalidArgument, "tick is not re-entrant");
  std::vector<SimEvent> emitted;
  tick_sink_ = &emitted;
  const double target = now_ + dt_s;
  try {
    while (!timers_.empty() && timers_.top().t <= target) {
      Timer timer = timers_.top();
      timers_.pop();
      now_ = std::max(now_, timer.t);
      switch (timer.kind) {
        case TimerKind::Poll:
          // Polls armed before a leave belong to a dead chain.
          if (timer.id == poll_generation_[timer.ieee]) poll(timer.ieee);
          break;
        case TimerKind::Expire: expire(timer.child, timer.id); break;
        case TimerKind::ClosePermitJoin: close_permit_join(timer.id); break;
        case TimerKind::Callback: timer.fn(); break;
      }
    }
  } catch (...) {
    tick_sink_ = nullptr;
    throw;
  }
  now_ = target;
  tick_sink_ = nullptr;
  return emitted;
}

void Network::subscribe(Listener listener) { listeners_.push_back(std::move(listener)); }

void Network::emit(SimEvent event) {
  event.t = now_;
  if (tick_sink_) tick_sink_->push_back(event);
  if (config_.retain_events) events_.push_back(event);
  for (std::size_t i = 0; i < listeners_.size(); ++i) listeners_[i](event);
}

const Node& Network::node(IeeeAddr ieee) const {
  auto it = nodes_.find(ieee);
  if (it == nodes_.end()) throw SimError(SimErrc::UnknownNode, ieee.str());
  return it->second;
}

Node& Network::node_mut(IeeeAddr ieee) {
  auto it = nodes_.find(ieee);
  if (it == nodes_.end()) throw SimError(SimErrc::UnknownNode, ieee.str());
  return it->second;
}

const Node* Network::find(ShortAddr addr) const noexcept {
  auto it = by_short_.find(addr);
  return it == by_short_.end() ? nullptr : &nodes_.at(it->second);
}

Node* Network::find_mut(ShortAddr addr) noexcept {
  auto it = by_short_.find(addr);
  return it == by_short_.end() ? nullptr : &nodes_.at(it->second);
}

std::vector<const Node*> Network::nodes() const {
  std::vector<const Node*> out;
  for (const auto& [ieee, node] : nodes_) out.push_back(&node);
  return out;
}

std::size_t Network::pending_count(ShortAddr child) const noexcept {
  auto it = pending_.find(child);
  return it == pending_.end() ? 0 : it->second.size();
}

}  // namespace zgw::sim
