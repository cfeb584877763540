// Acceptance suite for the primary criteria. One PASS/FAIL line per criterion,
// exit status 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../oracle/bridge_oracle.hpp"
#include "../oracle/crc_oracle.hpp"
#include "../oracle/mmo_oracle.hpp"
#include "../oracle/route_oracle.hpp"
#include "../oracle/topic_oracle.hpp"
#include "../support/mqtt_gen.hpp"
#include "zgw/common/hex.hpp"
#include "zgw/install_code/credential.hpp"
#include "zgw/install_code/crc16.hpp"
#include "zgw/install_code/mmo.hpp"
#include "zgw/mqtt/bridge.hpp"
#include "zgw/mqtt/codec.hpp"
#include "zgw/mqtt/host.hpp"
#include "zgw/mqtt/topic.hpp"
#include "zgw/scenario/scenario.hpp"
#include "zgw/sim/network.hpp"

#ifndef ZGW_GW_PATH
#error "ZGW_GW_PATH must point at the gw executable"
#endif

using nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;
namespace ic = zgw::install_code;

namespace {

// Collects failed checks for one criterion.
class Check {
 public:
  void operator()(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(std::string n) { notes_.push_back(std::move(n)); }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream os;
    os << count_ - failed_ << "/" << count_ << " checks";
    for (const auto& n : notes_) os << "; " << n;
    for (const auto& f : failures_) os << "; FAILED " << f;
    return os.str();
  }

 private:
  std::size_t count_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// --- 1 --------------------------------------------------------------------------------

void vendor_qr(Check& check) {
  struct Row {
    const char* vendor;
    const char* qr;
    const char* payload;
    ic::CredentialKind kind;
  };
  const Row rows[] = {
      {"Aqara", "G$M:X$S:X$D:X%Z$A:X$I:DB6DE11643FDA924FE033323F82C54618132",
       "DB6DE11643FDA924FE033323F82C54618132", ic::CredentialKind::InstallCode},
      {"Develco", "|X|675F67DE359BF9FEB4DF847042AF032824B5|", "675F67DE359BF9FEB4DF847042AF032824B5",
       ic::CredentialKind::InstallCode},
      {"Bosch", "X4CAE140FAD7E94FC70E7E8162985D165", "4CAE140FAD7E94FC70E7E8162985D165",
       ic::CredentialKind::PreHashedKey},
      {"Danfoss", "G$M:X%Z:X$I:E6402113FF0E2CE074B7C069AE35EB03A0D0%M:X",
       "E6402113FF0E2CE074B7C069AE35EB03A0D0", ic::CredentialKind::InstallCode},
  };
  double worst_ms = 0;
  for (const auto& row : rows) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto t0 = Clock::now();
      const auto c = ic::parse_qr_payload(row.qr);
      const double ms = seconds_since(t0) * 1e3;
      worst_ms = std::max(worst_ms, ms);
      if (rep > 0) continue;
      check(c.payload_hex() == row.payload, std::string(row.vendor) + " payload " + c.payload_hex());
      check(c.kind == row.kind, std::string(row.vendor) + " kind");
      check(ms < 1.0, std::string(row.vendor) + " first parse took " + fmt(ms) + " ms");
    }
  }
  check(worst_ms < 1.0, "worst parse " + fmt(worst_ms) + " ms");
  check(ic::derive_link_key(ic::parse_qr_payload(rows[2].qr)).hex() == rows[2].payload, "Bosch key passthrough");
  check.note("worst parse " + fmt(worst_ms, 4) + " ms");
}

// --- 2 --------------------------------------------------------------------------------

void crc_suite(Check& check) {
  const auto t0 = Clock::now();
  const std::string s = "123456789";
  const std::vector<std::uint8_t> data(s.begin(), s.end());
  check(ic::crc16_x25(data) == oracle::crc16_x25_bitwise(data), "check value vs bitwise oracle");
  check(oracle::crc16_x25_bitwise(data) == 0x906E, "bitwise oracle check value 906E");

  std::mt19937 rng(1);
  std::size_t flips = 0;
  for (std::size_t n : {6u, 8u, 12u, 16u}) {
    bool round_trip = true;
    for (int i = 0; i < 1000; ++i) {
      std::vector<std::uint8_t> code(n);
      for (auto& b : code) b = static_cast<std::uint8_t>(rng());
      const auto c = ic::make_install_code(code);
      const auto ref = oracle::crc16_x25_bitwise(code);
      round_trip = round_trip && ic::validate_install_code(c) == ic::Validity::Valid &&
                   (*c.crc_bytes)[0] == (ref & 0xFF) && (*c.crc_bytes)[1] == (ref >> 8);
    }
    check(round_trip, "round trip at length " + std::to_string(n));

    std::vector<std::uint8_t> code(n);
    for (auto& b : code) b = static_cast<std::uint8_t>(rng());
    const auto good = ic::make_install_code(code);
    bool detected = true;
    for (std::size_t bit = 0; bit < (n + 2) * 8; ++bit, ++flips) {
      auto bad = good;
      if (bit < n * 8) {
        bad.code_bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      } else {
        (*bad.crc_bytes)[(bit - n * 8) / 8] ^= static_cast<std::uint8_t>(1u << ((bit - n * 8) % 8));
      }
      detected = detected && ic::validate_install_code(bad) == ic::Validity::Invalid;
    }
    check(detected, "single-bit flips at length " + std::to_string(n));
  }
  const double s_elapsed = seconds_since(t0);
  check(s_elapsed < 1.0, "runtime " + fmt(s_elapsed) + " s");
  check.note(std::to_string(flips) + " flips, " + fmt(s_elapsed) + " s");
}

// --- 3 --------------------------------------------------------------------------------

void mmo(Check& check) {
  const auto t0 = Clock::now();
  const auto pinned = *zgw::hex::decode("83FED3407A939723A5C639B26916D505C3B5");
  const char* expected = "66B6900981E1EE3CA4206B6B861C02BB";
  check(zgw::hex::encode(ic::mmo_hash(pinned)) == expected, "pinned vector, in-house");
  check(zgw::hex::encode(oracle::mmo_openssl(pinned)) == expected, "pinned vector, oracle");
  check(ic::derive_link_key(ic::parse_qr_payload("83FED3407A939723A5C639B26916D505C3B5")).hex() == expected,
        "pinned vector through derive_link_key");

  std::mt19937 rng(3);
  int agree = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::uint8_t> msg(1 + rng() % 64);
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
    agree += ic::mmo_hash(msg) == oracle::mmo_openssl(msg);
  }
  check(agree == 100, std::to_string(agree) + "/100 random inputs agree");
  const double s_elapsed = seconds_since(t0);
  check(s_elapsed < 1.0, "runtime " + fmt(s_elapsed) + " s");
  check.note(fmt(s_elapsed) + " s");
}

// --- 4 --------------------------------------------------------------------------------

void codec_and_matcher(Check& check) {
  using namespace zgw::mqtt;
  std::mt19937_64 rng(4);
  int mismatches = 0;
  for (int i = 0; i < 10'000; ++i) {
    const MqttPacket p = gen::random_packet(rng);
    const auto wire = encode_packet(p);
    const auto r = decode_packet(wire);
    if (r.status != DecodeStatus::Complete || r.consumed != wire.size() || !(r.packet == p)) ++mismatches;
  }
  check(mismatches == 0, std::to_string(mismatches) + " codec mismatches");

  int disagree = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto [f, t] = gen::random_filter_topic(rng);
    const bool expected = oracle::matches(f, t);
    bool ok = TopicFilter::parse(f).has_value() == oracle::filter_valid(f) && topic_matches(f, t) == expected;
    if (auto tf = TopicFilter::parse(f); tf && is_valid_topic_name(t)) {
      SubscriptionTrie<int> trie;
      trie.insert(*tf, 1, 0);
      ok = ok && (trie.match(t).count(1) == 1) == expected;
    }
    disagree += !ok;
  }
  check(disagree == 0, std::to_string(disagree) + " matcher disagreements");
  check.note("10000 packets, 10000 pairs");
}

// --- 5 --------------------------------------------------------------------------------

void bridge(Check& check) {
  using namespace zgw::mqtt;
  const auto t0 = Clock::now();
  {
    std::vector<std::uint64_t> sent;
    Bridge b({10, 16}, [&](const BridgeMessage& m) { sent.push_back(m.seq); });
    for (int i = 0; i < 15; ++i) b.publish("gw/t", std::to_string(i));
    b.uplink_up();
    while (b.pump() > 0) {
      for (auto seq : std::vector<std::uint64_t>(sent)) b.ack(seq);
    }
    std::vector<std::uint64_t> expected;
    for (std::uint64_t s = 6; s <= 15; ++s) expected.push_back(s);
    check(sent == expected, "capacity 10, 15 offered: 6..15 relayed");
    check(b.stats().dropped == 5, "capacity 10, 15 offered: 5 dropped");
  }

  std::size_t total_offered = 0, total_dropped = 0;
  for (int schedule = 0; schedule < 50; ++schedule) {
    std::mt19937_64 rng(5000 + schedule);
    std::uniform_int_distribution<std::size_t> cap(5, 60), win(1, 10);
    const std::size_t capacity = cap(rng), window = win(rng);
    oracle::BridgeModel model{capacity, window, {}, 0, false, 1, {}, {}};
    std::vector<std::uint64_t> wire, pending;
    Bridge b({capacity, window}, [&](const BridgeMessage& m) {
      wire.push_back(m.seq);
      pending.push_back(m.seq);
    });
    std::uniform_int_distribution<int> op(0, 9), burst(1, 30), coin(0, 1);
    std::uint64_t offered = 0;
    bool seq_ok = true;
    auto deliver_acks = [&](bool shuffle) {
      std::vector<std::uint64_t> acks;
      acks.swap(pending);
      if (shuffle && coin(rng)) std::reverse(acks.begin(), acks.end());
      for (auto seq : acks) {
        b.ack(seq);
        model.ack(seq);
      }
    };
    for (int step = 0; step < 400; ++step) {
      switch (op(rng)) {
        case 0:
          b.uplink_down();
          model.down();
          pending.clear();
          break;
        case 1:
          b.uplink_up();
          model.up = true;
          break;
        case 2:
        case 3: deliver_acks(true); break;
        default:
          for (int i = burst(rng); i > 0; --i, ++offered) seq_ok = seq_ok && b.publish("gw/t", "p") == model.offer();
      }
      b.pump();
      model.pump();
    }
    b.uplink_up();
    model.up = true;
    for (int guard = 0; guard < 10'000; ++guard) {
      b.pump();
      model.pump();
      if (pending.empty()) break;
      deliver_acks(false);
    }

    const std::string tag = "schedule " + std::to_string(schedule);
    check(seq_ok, tag + ": sequence numbers");
    check(wire == model.observed, tag + ": uplink trace equals the model");
    check(b.stats().dropped == model.dropped.size(), tag + ": dropped count");
    check(b.stats().buffered == 0, tag + ": drained");
    std::set<std::uint64_t> seen;
    std::uint64_t last_first = 0;
    bool fifo = true;
    for (auto seq : wire) {
      if (seen.insert(seq).second) {
        fifo = fifo && seq > last_first;
        last_first = seq;
      }
    }
    check(fifo, tag + ": FIFO by first delivery");
    bool all = true;
    for (std::uint64_t seq = 1; seq <= offered; ++seq) {
      all = all && (model.dropped.count(seq) == 1 || seen.count(seq) == 1);
    }
    check(all, tag + ": every non-dropped message delivered");
    total_offered += offered;
    total_dropped += b.stats().dropped;
  }
  const double s_elapsed = seconds_since(t0);
  check(s_elapsed < 10.0, "runtime " + fmt(s_elapsed) + " s");
  check.note("50 schedules, " + std::to_string(total_offered) + " offered, " + std::to_string(total_dropped) +
             " dropped, " + fmt(s_elapsed) + " s");
}

// --- 6 --------------------------------------------------------------------------------

namespace sim = zgw::sim;

constexpr sim::IeeeAddr kCoord{0x00124b0000000000};

sim::NodeConfig coordinator(sim::Position p = {0, 0}) { return {kCoord, sim::Role::Coordinator, p, false, 0, ""}; }
sim::NodeConfig router(std::uint64_t id, sim::Position p) {
  return {sim::IeeeAddr{id}, sim::Role::Router, p, false, 0, "router"};
}
sim::NodeConfig sensor(std::uint64_t id, sim::Position p) {
  return {sim::IeeeAddr{id}, sim::Role::EndDevice, p, true, 5.0, "sensor"};
}
ic::LinkKey key_of(std::uint8_t fill) {
  ic::LinkKey k;
  k.key.fill(fill);
  return k;
}
sim::NetworkConfig quiet(std::vector<sim::NodeConfig> nodes, std::uint64_t seed) {
  sim::NetworkConfig cfg;
  cfg.seed = seed;
  cfg.radio.noise_amplitude = 0.0;
  cfg.nodes = std::move(nodes);
  return cfg;
}

void join_and_route(Check& check) {
  using sim::JoinStatus;
  for (int mask = 0; mask < 8; ++mask) {
    const bool window = mask & 1, key_match = mask & 2, in_range = mask & 4;
    auto net = sim::Network::form(
        quiet({coordinator(), router(7, {3, 0}), sensor(1, {in_range ? 10.0 : 400.0, 0})}, 42));
    net.register_key(sim::IeeeAddr{7}, key_of(7));
    net.permit_join(254);
    net.join(sim::IeeeAddr{7}, key_of(7));
    if (!window) net.permit_join(0);
    net.register_key(sim::IeeeAddr{1}, key_of(1));
    const auto r = net.join(sim::IeeeAddr{1}, key_of(key_match ? 1 : 9));
    JoinStatus expected = JoinStatus::Joined;
    if (!window) expected = JoinStatus::PermitJoinClosed;
    else if (!key_match) expected = JoinStatus::KeyMismatch;
    else if (!in_range) expected = JoinStatus::NoParentInRange;
    check(r.status == expected, "combination " + std::to_string(mask));
    check(net.node(sim::IeeeAddr{1}).joined() == (expected == JoinStatus::Joined),
          "combination " + std::to_string(mask) + " membership");
  }

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> coord(0.0, 160.0);
  std::size_t pairs = 0, wrong = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    std::vector<sim::NodeConfig> nodes{coordinator({coord(rng), coord(rng)})};
    for (int i = 1; i < n; ++i) {
      const sim::Position p{coord(rng), coord(rng)};
      nodes.push_back(rng() % 3 == 0 ? sensor(i, p) : router(i, p));
    }
    auto cfg = quiet(nodes, trial);
    if (rng() % 2) cfg.walls.push_back({{coord(rng), coord(rng)}, {coord(rng), coord(rng)}});
    auto net = sim::Network::form(cfg);
    net.permit_join(254);
    for (int pass = 0; pass < n; ++pass) {
      for (int i = 1; i < n; ++i) {
        const sim::IeeeAddr ieee{static_cast<std::uint64_t>(i)};
        if (net.node(ieee).joined()) continue;
        net.register_key(ieee, key_of(1));
        net.join(ieee, key_of(1));
      }
    }
    std::vector<sim::ShortAddr> addrs;
    for (const sim::Node* node : net.nodes()) {
      if (node->joined()) addrs.push_back(*node->short_addr);
    }
    for (auto s : addrs) {
      for (auto d : addrs) {
        ++pairs;
        const auto expect = oracle::brute_force_route(net, s, d);
        try {
          const auto got = net.route(s, d);
          wrong += !expect || got != expect->path;
        } catch (const sim::SimError&) {
          wrong += expect.has_value();
        }
      }
    }
  }
  check(wrong == 0, std::to_string(wrong) + " of " + std::to_string(pairs) + " routes differ");
  check.note("8 combinations, 100 topologies, " + std::to_string(pairs) + " routes");
}

// --- 7 --------------------------------------------------------------------------------

struct CliRun {
  int status = -1;
  std::string out;
  double seconds = 0;
};

CliRun run_cli(const std::string& args) {
  CliRun r;
  const std::string cmd = std::string("\"") + ZGW_GW_PATH + "\" " + args + " 2>&1";
  const auto t0 = Clock::now();
  if (FILE* p = ::popen(cmd.c_str(), "r")) {
    char buf[512];
    while (std::fgets(buf, sizeof buf, p)) r.out += buf;
    r.status = ::pclose(p);
  }
  r.seconds = seconds_since(t0);
  while (!r.out.empty() && (r.out.back() == '\n' || r.out.back() == '\r')) r.out.pop_back();
  return r;
}

void case_study(Check& check) {
  const auto dir = fs::temp_directory_path() / "zgw_acceptance_case_study";
  fs::remove_all(dir);
  std::vector<json> reports;
  for (const char* sub : {"a", "b"}) {
    const auto out = dir / sub;
    const auto r = run_cli("simulate --scenario office --hours 96 --out \"" + out.string() + "\"");
    check(r.status == 0, std::string("run ") + sub + " exit status, output: " + r.out);
    check(r.seconds < 60.0, std::string("run ") + sub + " took " + fmt(r.seconds) + " s");
    check(fs::path(r.out) == out / "report.json", std::string("run ") + sub + " prints the report path");
    std::ifstream in(out / "report.json");
    if (!in) {
      check(false, "report missing");
      return;
    }
    reports.push_back(json::parse(in));
    check.note(std::string("run ") + sub + " " + fmt(r.seconds) + " s");
  }
  const auto& r = reports[0];
  check(r["devices_joined"] == 10, "devices joined " + r["devices_joined"].dump());
  check(r["routers"] == 0, "routers " + r["routers"].dump());
  const double ratio = r["occupancy"]["ratio"].get<double>();
  check(ratio >= 2.0, "occupancy ratio " + fmt(ratio));
  const auto& move = r["relocations"].at(0);
  const double before = move["lqi_mean_before"].get<double>(), after = move["lqi_mean_after"].get<double>();
  check(move["at_s"].get<double>() == 48 * 3600.0, "relocation at 48 h");
  check(after < before, "lqi after " + fmt(after, 1) + " vs before " + fmt(before, 1));
  check(r["checksum"] == reports[1]["checksum"], "checksums " + r["checksum"].dump() + " " +
                                                    reports[1]["checksum"].dump());
  check(r["conservation"]["balanced"] == true, "message conservation");
  check.note("ratio " + fmt(ratio, 2) + ", lqi " + fmt(before, 1) + " -> " + fmt(after, 1) + ", checksum " +
             r["checksum"].get<std::string>());
  fs::remove_all(dir);
}

// --- 8 --------------------------------------------------------------------------------

void co2_equilibrium(Check& check) {
  using namespace zgw::scenario;
  auto cfg = builtin_scenario("office");
  // Fixed point of dC/dt = 300*n - 0.7*(C - 420) for n = 1.
  const double expected = 420.0 + 300.0 / 0.7;
  check(cfg.rates.co2_ambient_ppm == 420.0 && cfg.rates.co2_k_occ == 300.0 && cfg.rates.co2_k_vent == 0.7,
        "scenario carries the stated CO2 constants");
  cfg.schedule.constant_occupants = 1;
  CaseStudy study(cfg);
  study.run_until(24 * 3600.0);
  for (const char* name : {"office1_co2", "office2_co2"}) {
    const double model = study.co2(name);
    const auto reported = study.telemetry().last(zgw::telemetry::state_series(name, "co2"));
    const double err_model = std::abs(model - expected) / expected;
    check(err_model < 0.02, std::string(name) + " model " + fmt(model, 1));
    check(reported && std::abs(reported->value - expected) / expected < 0.02,
          std::string(name) + " reported " + (reported ? fmt(reported->value, 1) : "none"));
    check.note(std::string(name) + " " + fmt(model, 1) + " ppm vs " + fmt(expected, 1));
  }
}

// --- 9 --------------------------------------------------------------------------------

void setpoint_round_trip(Check& check) {
  using namespace zgw;
  scenario::CaseStudy study(scenario::builtin_scenario("office"));
  study.run_until(10 * 60);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> setpoint(5.0, 35.0);
  int trials = 0;
  double worst = 0;
  for (const char* name : {"office1_thermostat", "office2_thermostat"}) {
    const std::string topic = std::string("gw/") + name;
    for (int i = 0; i < 10; ++i, ++trials) {
      std::vector<double> states;
      mqtt::LocalClient op(study.broker(), "acceptance-op", [&](const mqtt::Publish& p) {
        if (p.topic != topic) return;
        const auto j = json::parse(p.payload);
        if (j.contains("occupied_heating_setpoint")) states.push_back(j["occupied_heating_setpoint"].get<double>());
      }, study.now());
      op.subscribe(topic, 0, study.now());
      const double previous = states.empty() ? std::nan("") : states.back();
      states.clear();
      const double v = setpoint(rng);
      op.publish(topic + "/set", json{{"occupied_heating_setpoint", v}}.dump(), 1, false, study.now());
      study.run_until(study.now() + 60);

      // The first state after the write that differs from the old value must be the new one.
      std::optional<double> next;
      for (double s : states) {
        if (std::isnan(previous) || std::abs(s - previous) > 1e-9) {
          next = s;
          break;
        }
      }
      const std::string tag = std::string(name) + " " + fmt(v, 4);
      check(next && std::abs(*next - v) <= 0.01 + 1e-9, tag + " next state " + (next ? fmt(*next, 4) : "none"));
      if (next) worst = std::max(worst, std::abs(*next - v));

      std::optional<double> retained;
      mqtt::LocalClient late(study.broker(), "acceptance-late", [&](const mqtt::Publish& p) {
        if (p.topic == topic && p.retain) {
          retained = json::parse(p.payload).value("occupied_heating_setpoint", std::nan(""));
        }
      }, study.now());
      late.subscribe(topic, 0, study.now());
      check(retained && std::abs(*retained - v) <= 0.01 + 1e-9,
            tag + " retained " + (retained ? fmt(*retained, 4) : "none"));
      study.run_until(study.now() + 600);
    }
  }
  check.note(std::to_string(trials) + " setpoints, worst error " + fmt(worst, 4) + " C");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "vendor_qr_fidelity", vendor_qr},
      {2, "crc_suite", crc_suite},
      {3, "mmo_key_derivation", mmo},
      {4, "mqtt_codec_and_matcher", codec_and_matcher},
      {5, "bridge_store_and_forward", bridge},
      {6, "join_soundness_and_routing", join_and_route},
      {7, "case_study_run", case_study},
      {8, "co2_equilibrium", co2_equilibrium},
      {9, "setpoint_round_trip", setpoint_round_trip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto t0 = Clock::now();
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    const double s = seconds_since(t0);
    std::cout << (check.ok() ? "PASS" : "FAIL") << " " << c.id << " " << c.name << " (" << fmt(s) << " s) "
              << check.summary() << std::endl;
    failed += !check.ok();
  }
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
