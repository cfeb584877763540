#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "../oracle/route_oracle.hpp"
#include "zgw/common/hex.hpp"
#include "zgw/sim/network.hpp"
#include "zgw/sim/topology.hpp"

using namespace zgw::sim;
using zgw::install_code::LinkKey;
using zgw::install_code::parse_qr_payload;

namespace {

constexpr IeeeAddr kCoord{0x00124b0000000000};

NodeConfig coordinator(Position p = {0, 0}) { return {kCoord, Role::Coordinator, p, false, 0, ""}; }
NodeConfig router(std::uint64_t id, Position p) { return {IeeeAddr{id}, Role::Router, p, false, 0, "router"}; }
NodeConfig sensor(std::uint64_t id, Position p, double poll = 5.0) {
  return {IeeeAddr{id}, Role::EndDevice, p, true, poll, "sensor"};
}

LinkKey key_of(std::uint8_t fill) {
  LinkKey k;
  k.key.fill(fill);
  return k;
}

NetworkConfig quiet(std::vector<NodeConfig> nodes, std::uint64_t seed = 42) {
  NetworkConfig cfg;
  cfg.seed = seed;
  cfg.radio.noise_amplitude = 0.0;
  cfg.nodes = std::move(nodes);
  return cfg;
}

ShortAddr admit(Network& net, IeeeAddr ieee, std::uint8_t fill = 0x11) {
  net.register_key(ieee, key_of(fill));
  if (!net.permit_join_open()) net.permit_join(254);
  auto r = net.join(ieee, key_of(fill));
  REQUIRE(r.status == JoinStatus::Joined);
  return *r.short_addr;
}

Frame report_frame(ShortAddr src, ShortAddr dst) {
  Frame f;
  f.src = src;
  f.dst = dst;
  f.cluster_id = zgw::cluster::kTemperature;
  f.attributes.push_back({zgw::cluster::kTemperature, 0x0000, std::int64_t{2150}});
  return f;
}

std::size_t count(const std::vector<SimEvent>& events, EventKind kind) {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const SimEvent& e) { return e.kind == kind; }));
}

std::string dump(const Network& net) {
  std::ostringstream os;
  for (const auto& e : net.events()) os << to_json(e).dump() << '\n';
  return os.str();
}

}  // namespace

TEST_CASE("form: single coordinator network") {
  auto net = Network::form(quiet({coordinator()}));
  CHECK(net.node_count() == 1);
  CHECK(net.links().empty());
  CHECK(net.node(kCoord).short_addr == kCoordinatorAddr);
  CHECK_FALSE(net.permit_join_open());
  CHECK(net.now() == 0.0);
}

TEST_CASE("form: coordinator count is enforced") {
  auto second = coordinator();
  second.ieee.value += 1;
  CHECK_THROWS_AS(Network::form(quiet({coordinator(), second})), SimError);
  CHECK_THROWS_AS(Network::form(quiet({router(1, {1, 1})})), SimError);
  auto net = Network::form(quiet({coordinator()}));
  CHECK_THROWS_AS(net.add_node(second), SimError);
}

TEST_CASE("compute_lqi: model points") {
  RadioModel m;
  CHECK(compute_lqi(m, 0.0, 0, 0.0) == 255);
  CHECK(compute_lqi(m, 100.0, 0, 5.0) == 0);
  CHECK(compute_lqi(m, 150.0, 0, 0.0) == 0);
  // 255 * 0.88 - 80 = 144.4
  CHECK(compute_lqi(m, 12.0, 2, 0.0) == 144);
  CHECK(compute_lqi(m, 0.0, 0, 5.0) == 255);
  CHECK(compute_lqi(m, 99.0, 3, 0.0) == 0);
}

TEST_CASE("compute_lqi: monotone in distance and walls without noise") {
  RadioModel m;
  for (int walls = 0; walls < 7; ++walls) {
    int prev = 256;
    for (double d = 0.0; d <= 110.0; d += 0.25) {
      const int lqi = compute_lqi(m, d, walls, 0.0);
      CHECK(lqi <= prev);
      CHECK(lqi <= compute_lqi(m, d, walls > 0 ? walls - 1 : 0, 0.0));
      prev = lqi;
    }
  }
}

TEST_CASE("wall crossings") {
  std::vector<Wall> walls{{{6, 0}, {6, 8}}, {{9, 0}, {9, 8}}};
  CHECK(count_wall_crossings({3, 4}, {12, 4}, walls) == 2);
  CHECK(count_wall_crossings({3, 4}, {5, 4}, walls) == 0);
  CHECK(count_wall_crossings({3, 4}, {7, 4}, walls) == 1);
  CHECK(count_wall_crossings({3, 9}, {12, 9}, walls) == 0);
}

TEST_CASE("register_credential: vendor credentials") {
  auto net = Network::form(quiet({coordinator()}));
  // Develco pipe layout carrying the CRC the X-25 oracle computes for its code.
  net.register_credential(IeeeAddr{1}, parse_qr_payload("|X|675F67DE359BF9FEB4DF847042AF0328C017|"));
  CHECK(net.registered_key(IeeeAddr{1}).has_value());

  net.register_credential(IeeeAddr{2}, parse_qr_payload("X4CAE140FAD7E94FC70E7E8162985D165"));
  CHECK(net.registered_key(IeeeAddr{2})->hex() == "4CAE140FAD7E94FC70E7E8162985D165");

  CHECK_THROWS_AS(net.register_credential(IeeeAddr{3}, parse_qr_payload("|X|675F67DE359BF9FEB4DF847042AF032824B5|")),
                  zgw::install_code::CredentialError);
  CHECK_FALSE(net.registered_key(IeeeAddr{3}).has_value());
}

TEST_CASE("permit_join: window semantics") {
  auto net = Network::form(quiet({coordinator(), sensor(1, {5, 0})}));
  net.register_key(IeeeAddr{1}, key_of(1));

  SUBCASE("open window admits later joins") {
    net.permit_join(254);
    net.tick(100);
    auto r = net.join(IeeeAddr{1}, key_of(1));
    CHECK(r.status == JoinStatus::Joined);
    CHECK(r.short_addr == ShortAddr{0x0001});
    CHECK(r.parent == kCoordinatorAddr);
  }
  SUBCASE("zero closes immediately") {
    net.permit_join(254);
    net.permit_join(0);
    CHECK(net.join(IeeeAddr{1}, key_of(1)).status == JoinStatus::PermitJoinClosed);
  }
  SUBCASE("range cap") {
    CHECK_THROWS_AS(net.permit_join(300), SimError);
    CHECK_THROWS_AS(net.permit_join(-1), SimError);
  }
  SUBCASE("window closes on tick with an event") {
    net.permit_join(10);
    auto events = net.tick(11);
    CHECK(count(events, EventKind::PermitJoinClosed) == 1);
    CHECK(net.join(IeeeAddr{1}, key_of(1)).status == JoinStatus::PermitJoinClosed);
  }
}

TEST_CASE("join: rejection reasons") {
  auto net = Network::form(quiet({coordinator(), sensor(1, {5, 0}), sensor(2, {5, 1})}));
  net.register_key(IeeeAddr{1}, key_of(1));
  net.permit_join(60);
  CHECK(net.join(IeeeAddr{1}, key_of(2)).status == JoinStatus::KeyMismatch);
  CHECK(net.join(IeeeAddr{2}, key_of(2)).status == JoinStatus::NotRegistered);
  CHECK(net.join(IeeeAddr{1}, key_of(1)).status == JoinStatus::Joined);
  CHECK(net.join(IeeeAddr{1}, key_of(1)).status == JoinStatus::AlreadyJoined);
  CHECK_THROWS_AS(net.join(IeeeAddr{99}, key_of(1)), SimError);
}

TEST_CASE("join: soundness over all eight condition combinations") {
  for (int mask = 0; mask < 8; ++mask) {
    const bool window = mask & 1;
    const bool key_match = mask & 2;
    const bool in_range = mask & 4;
    CAPTURE(mask);
    // Three nodes: coordinator, a router next to it, and the joining device.
    auto net = Network::form(quiet({coordinator(), router(7, {3, 0}), sensor(1, {in_range ? 10.0 : 400.0, 0})}));
    net.register_key(IeeeAddr{7}, key_of(7));
    net.permit_join(254);
    REQUIRE(net.join(IeeeAddr{7}, key_of(7)).status == JoinStatus::Joined);
    if (!window) net.permit_join(0);
    net.register_key(IeeeAddr{1}, key_of(1));
    const auto r = net.join(IeeeAddr{1}, key_of(key_match ? 1 : 9));
    CHECK((r.status == JoinStatus::Joined) == (window && key_match && in_range));
    if (!window) CHECK(r.status == JoinStatus::PermitJoinClosed);
    else if (!key_match) CHECK(r.status == JoinStatus::KeyMismatch);
    else if (!in_range) CHECK(r.status == JoinStatus::NoParentInRange);
  }
}

TEST_CASE("join: parent is the strongest in-range coordinator or router") {
  auto net = Network::form(quiet({coordinator({0, 0}), router(7, {40, 0}), sensor(1, {45, 0})}));
  admit(net, IeeeAddr{7});
  const auto r = admit(net, IeeeAddr{1});
  CHECK(net.node(IeeeAddr{1}).parent == net.node(IeeeAddr{7}).short_addr);
  CHECK(r == ShortAddr{0x0002});
}

TEST_CASE("join: short addresses stay unique and reuse the lowest free slot") {
  std::vector<NodeConfig> nodes{coordinator()};
  for (std::uint64_t i = 1; i <= 6; ++i) nodes.push_back(router(i, {double(i), 0}));
  auto net = Network::form(quiet(nodes));
  for (std::uint64_t i = 1; i <= 6; ++i) admit(net, IeeeAddr{i});
  net.leave(IeeeAddr{3});
  CHECK(admit(net, IeeeAddr{3}) == ShortAddr{0x0003});
  std::set<ShortAddr> seen;
  for (const Node* n : net.nodes()) {
    if (n->joined()) CHECK(seen.insert(*n->short_addr).second);
  }
}

TEST_CASE("route: simple shapes") {
  SUBCASE("adjacent") {
    auto net = Network::form(quiet({coordinator(), router(1, {10, 0})}));
    auto a = admit(net, IeeeAddr{1});
    CHECK(net.route(kCoordinatorAddr, a) == std::vector<ShortAddr>{kCoordinatorAddr, a});
  }
  SUBCASE("forced relay") {
    auto net = Network::form(quiet({coordinator(), router(1, {60, 0}), router(2, {120, 0})}));
    auto r = admit(net, IeeeAddr{1});
    auto d = admit(net, IeeeAddr{2});
    CHECK(net.route(kCoordinatorAddr, d) == std::vector<ShortAddr>{kCoordinatorAddr, r, d});
  }
  SUBCASE("tie broken by the stronger bottleneck") {
    auto cfg = quiet({coordinator(), router(1, {60, 10}), router(2, {60, -10}), router(3, {120, 0})});
    cfg.walls.push_back({{30, 3}, {30, 30}});
    auto net = Network::form(cfg);
    auto r1 = admit(net, IeeeAddr{1});
    auto r2 = admit(net, IeeeAddr{2});
    auto d = admit(net, IeeeAddr{3});
    const Node& c = net.node(kCoord);
    const int via1 = std::min(net.link_between(c, net.node(IeeeAddr{1})).lqi,
                              net.link_between(net.node(IeeeAddr{1}), net.node(IeeeAddr{3})).lqi);
    const int via2 = std::min(net.link_between(c, net.node(IeeeAddr{2})).lqi,
                              net.link_between(net.node(IeeeAddr{2}), net.node(IeeeAddr{3})).lqi);
    REQUIRE(via2 > via1);
    CHECK(net.route(kCoordinatorAddr, d) == std::vector<ShortAddr>{kCoordinatorAddr, r2, d});
    (void)r1;
  }
  SUBCASE("end devices never relay") {
    auto net = Network::form(quiet({coordinator(), sensor(1, {60, 0}), router(2, {120, 0})}));
    admit(net, IeeeAddr{1});
    net.register_key(IeeeAddr{2}, key_of(2));
    CHECK(net.join(IeeeAddr{2}, key_of(2)).status == JoinStatus::NoParentInRange);
  }
  SUBCASE("unreachable") {
    auto net = Network::form(quiet({coordinator(), router(1, {10, 0})}));
    auto a = admit(net, IeeeAddr{1});
    net.set_position(IeeeAddr{1}, {500, 0});
    CHECK_THROWS_AS(net.route(kCoordinatorAddr, a), SimError);
  }
}

TEST_CASE("route: agrees with exhaustive search on random topologies") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(0.0, 160.0);
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<NodeConfig> nodes{coordinator({coord(rng), coord(rng)})};
    for (int i = 1; i < n; ++i) {
      const Position p{coord(rng), coord(rng)};
      nodes.push_back(rng() % 3 == 0 ? sensor(i, p) : router(i, p));
    }
    auto cfg = quiet(nodes, trial);
    if (rng() % 2) cfg.walls.push_back({{coord(rng), coord(rng)}, {coord(rng), coord(rng)}});
    auto net = Network::form(cfg);
    net.permit_join(254);
    // Several passes so devices can join through routers that joined later.
    for (int pass = 0; pass < n; ++pass) {
      for (int i = 1; i < n; ++i) {
        const IeeeAddr ieee{static_cast<std::uint64_t>(i)};
        if (net.node(ieee).joined()) continue;
        net.register_key(ieee, key_of(1));
        net.join(ieee, key_of(1));
      }
    }
    std::vector<ShortAddr> addrs;
    for (const Node* node : net.nodes()) {
      if (node->joined()) addrs.push_back(*node->short_addr);
    }
    for (auto s : addrs) {
      for (auto d : addrs) {
        auto expect = oracle::brute_force_route(net, s, d);
        if (!expect) {
          CHECK_THROWS_AS(net.route(s, d), SimError);
          continue;
        }
        CHECK(net.route(s, d) == expect->path);
        ++compared;
      }
    }
  }
  CHECK(compared > 500);
}

TEST_CASE("deliver: awake and sleepy receivers") {
  auto net = Network::form(quiet({coordinator(), router(1, {10, 0}), sensor(2, {5, 5}, 5.0)}));
  auto r = admit(net, IeeeAddr{1});
  auto s = admit(net, IeeeAddr{2});

  SUBCASE("awake router receives in the same tick") {
    auto res = net.deliver(report_frame(kCoordinatorAddr, r));
    CHECK(res.status == DeliveryStatus::Delivered);
    CHECK(net.events().back().kind == EventKind::FrameDelivered);
    CHECK(net.events().back().frame->lqi_at_receiver == net.link_between(net.node(kCoord), net.node(IeeeAddr{1})).lqi);
  }
  SUBCASE("sleepy sensor receives at its next poll") {
    net.tick(1.0);
    auto res = net.deliver(report_frame(kCoordinatorAddr, s));
    CHECK(res.status == DeliveryStatus::Queued);
    CHECK(net.pending_count(s) == 1);
    auto before = net.tick(3.0);
    CHECK(count(before, EventKind::FrameDelivered) == 0);
    auto at_poll = net.tick(1.0);
    REQUIRE(count(at_poll, EventKind::FrameDelivered) == 1);
    CHECK(at_poll.back().t == doctest::Approx(5.0));
  }
  SUBCASE("nine frames before a poll: oldest dropped, eight delivered") {
    std::vector<std::uint64_t> ids;
    for (int i = 0; i < 9; ++i) ids.push_back(net.deliver(report_frame(kCoordinatorAddr, s)).frame_id);
    CHECK(count(net.events(), EventKind::DroppedPending) == 1);
    auto dropped = std::find_if(net.events().begin(), net.events().end(),
                                [](const SimEvent& e) { return e.kind == EventKind::DroppedPending; });
    CHECK(dropped->frame->id == ids.front());
    auto events = net.tick(5.0);
    CHECK(count(events, EventKind::FrameDelivered) == 8);
  }
  SUBCASE("uplink from a sleepy sensor is immediate") {
    auto res = net.deliver(report_frame(s, kCoordinatorAddr));
    CHECK(res.status == DeliveryStatus::Delivered);
  }
}

TEST_CASE("deliver: frames expire when polls are too slow") {
  auto net = Network::form(quiet({coordinator(), sensor(1, {5, 0}, 10.0)}));
  auto s = admit(net, IeeeAddr{1});
  net.deliver(report_frame(kCoordinatorAddr, s));
  auto events = net.tick(10.0);
  CHECK(count(events, EventKind::FrameExpired) == 1);
  CHECK(count(events, EventKind::FrameDelivered) == 0);
  CHECK(net.stats().expired == 1);
}

TEST_CASE("tick: poll cadence") {
  auto net = Network::form(quiet({coordinator(), sensor(1, {5, 0}, 5.0)}));
  admit(net, IeeeAddr{1});
  CHECK(count(net.tick(5.0), EventKind::Poll) == 1);
  CHECK(count(net.tick(20.0), EventKind::Poll) == 4);
  CHECK_THROWS_AS(net.tick(0.0), SimError);
}

TEST_CASE("tick: scheduled callbacks run in time order") {
  auto net = Network::form(quiet({coordinator()}));
  std::vector<int> order;
  net.schedule_at(3.0, [&] { order.push_back(3); });
  net.schedule_at(1.0, [&] { order.push_back(1); });
  net.schedule_at(1.0, [&] { order.push_back(2); });
  net.tick(2.0);
  CHECK(order == std::vector<int>{1, 2});
  net.tick(2.0);
  CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("relocation beyond range: polls fail and pending frames expire") {
  auto net = Network::form(quiet({coordinator(), sensor(1, {5, 0}, 5.0)}));
  auto s = admit(net, IeeeAddr{1});
  net.set_position(IeeeAddr{1}, {150, 0});
  CHECK_THROWS_AS(net.deliver(report_frame(kCoordinatorAddr, s)), SimError);
  net.set_position(IeeeAddr{1}, {5, 0});
  net.deliver(report_frame(kCoordinatorAddr, s));
  net.set_position(IeeeAddr{1}, {150, 0});
  auto events = net.tick(10.0);
  CHECK(count(events, EventKind::PollFailed) == 2);
  CHECK(count(events, EventKind::FrameExpired) == 1);
}

namespace {

std::string scripted_run(std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.seed = seed;
  cfg.nodes = {coordinator(), router(1, {20, 0}), sensor(2, {25, 5}, 5.0), sensor(3, {3, 3}, 7.0)};
  auto net = Network::form(cfg);
  net.permit_join(120);
  for (std::uint64_t i = 1; i <= 3; ++i) {
    net.register_key(IeeeAddr{i}, key_of(static_cast<std::uint8_t>(i)));
    net.join(IeeeAddr{i}, key_of(static_cast<std::uint8_t>(i)));
  }
  for (int step = 0; step < 50; ++step) {
    net.deliver(report_frame(*net.node(IeeeAddr{2}).short_addr, kCoordinatorAddr));
    if (step % 3 == 0) net.deliver(report_frame(kCoordinatorAddr, *net.node(IeeeAddr{3}).short_addr));
    net.tick(2.5);
  }
  return dump(net);
}

}  // namespace

TEST_CASE("determinism: identical seeds give identical event logs") {
  CHECK(scripted_run(42) == scripted_run(42));
  CHECK(scripted_run(42) != scripted_run(43));
}

TEST_CASE("conservation: every frame delivered, dropped or expired") {
  NetworkConfig cfg;
  cfg.seed = 5;
  cfg.nodes = {coordinator(), sensor(1, {5, 0}, 9.0), sensor(2, {8, 0}, 4.0)};
  auto net = Network::form(cfg);
  for (std::uint64_t i = 1; i <= 2; ++i) admit(net, IeeeAddr{i}, static_cast<std::uint8_t>(i));
  std::mt19937 rng(1);
  for (int step = 0; step < 400; ++step) {
    const int burst = static_cast<int>(rng() % 4);
    for (int b = 0; b < burst; ++b) {
      net.deliver(report_frame(kCoordinatorAddr, *net.node(IeeeAddr{1 + rng() % 2}).short_addr));
    }
    net.tick(1.0 + (rng() % 3));
  }
  net.tick(30.0);
  std::map<std::uint64_t, int> outcomes;
  std::set<std::uint64_t> created;
  for (const auto& e : net.events()) {
    if (!e.frame) continue;
    if (e.kind == EventKind::FrameQueued) created.insert(e.frame->id);
    if (e.kind == EventKind::FrameDelivered || e.kind == EventKind::DroppedPending || e.kind == EventKind::FrameExpired) {
      ++outcomes[e.frame->id];
    }
  }
  CHECK(created.size() == net.stats().created);
  for (auto id : created) CHECK(outcomes[id] == 1);
  const auto& st = net.stats();
  CHECK(st.created == st.delivered + st.dropped + st.expired + st.pending);
  CHECK(st.pending == 0);
  CHECK(st.expired > 0);
}

TEST_CASE("topology TOML") {
  auto cfg = parse_topology(R"(
seed = 7
[radio]
noise_amplitude = 0.0
wall_penalty = 30.0
[[walls]]
from = [6.0, 0.0]
to = [6.0, 8.0]
[[nodes]]
ieee = "0x00124b0000000000"
role = "coordinator"
position = [3.0, 4.0]
[[nodes]]
ieee = "0x00124b0000000001"
role = "end_device"
sleepy = true
poll_interval_s = 5.0
position = [10.0, 4.0]
model_id = "ZGW-CO2"
)");
  CHECK(cfg.seed == 7);
  CHECK(cfg.radio.wall_penalty == 30.0);
  CHECK(cfg.walls.size() == 1);
  REQUIRE(cfg.nodes.size() == 2);
  CHECK(cfg.nodes[1].sleepy);
  CHECK(cfg.nodes[1].model_id == "ZGW-CO2");
  auto net = Network::form(cfg);
  CHECK(net.node_count() == 2);

  CHECK_THROWS_AS(parse_topology("[[nodes]]\nrole = \"router\"\n"), SimError);
  CHECK_THROWS_AS(parse_topology("seed = = 3"), SimError);
}
