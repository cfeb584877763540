#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "zgw/scenario/scenario.hpp"

using namespace zgw;
using namespace zgw::scenario;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kHour = 3600.0;

ScenarioConfig office() { return builtin_scenario("office"); }

// Closed-form solution of dC/dt = k_occ*n - k_vent*(C - ambient), t in hours.
double co2_exact(double c0, int n, double t_h, double ambient, double k_occ, double k_vent) {
  const double eq = ambient + k_occ * n / k_vent;
  return eq + (c0 - eq) * std::exp(-k_vent * t_h);
}

}  // namespace

TEST_CASE("occupancy follows office hours, overrides and weekends") {
  const auto cfg = office();
  const auto& s = cfg.schedule;
  // Days 0 and 1 are the low-traffic days, days 2 and 3 normal weekdays.
  CHECK(s.occupants(1, 0 * 24 * kHour + 10 * kHour) == 0);
  CHECK(s.occupants(2, 1 * 24 * kHour + 10 * kHour) == 0);
  CHECK(s.occupants(1, 2 * 24 * kHour + 10 * kHour) == 2);
  CHECK(s.occupants(2, 3 * 24 * kHour + 16.99 * kHour) == 2);
  CHECK(s.occupants(1, 2 * 24 * kHour + 7.99 * kHour) == 0);
  CHECK(s.occupants(1, 2 * 24 * kHour + 17 * kHour) == 0);

  OccupancySchedule week;
  week.start_weekday = 4;  // Friday
  CHECK(week.occupants(1, 10 * kHour) == 2);
  CHECK(week.occupants(1, 24 * kHour + 10 * kHour) == 0);      // Saturday
  CHECK(week.occupants(1, 2 * 24 * kHour + 10 * kHour) == 0);  // Sunday
  CHECK(week.occupants(1, 3 * 24 * kHour + 10 * kHour) == 2);  // Monday

  week.constant_occupants = 1;
  CHECK(week.occupants(1, 24 * kHour + 3 * kHour) == 1);
}

TEST_CASE("CO2 model") {
  const Co2Model m{420, 300, 0.7};
  SUBCASE("fixed point is 420 + k_occ/k_vent") {
    CHECK(m.equilibrium(1) == doctest::Approx(420.0 + 300.0 / 0.7));
    CHECK(m.equilibrium(0) == 420.0);
    CHECK(m.derivative(m.equilibrium(2), 2) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("Euler at the tick resolution tracks the exact solution") {
    double c = 420;
    for (int i = 1; i <= 24 * 60; ++i) {
      c = m.step(c, 1, 60);
      if (i % 60 == 0) CHECK(c == doctest::Approx(co2_exact(420, 1, i / 60.0, 420, 300, 0.7)).epsilon(0.01));
    }
    CHECK(std::abs(c - 848.5714) / 848.5714 < 0.02);
  }
  SUBCASE("decay with nobody present is monotone and never below ambient") {
    double c = 1500;
    for (int i = 0; i < 24 * 60; ++i) {
      const double next = m.step(c, 0, 60);
      CHECK(next <= c + 1.0);
      CHECK(next >= 420.0);
      c = next;
    }
    CHECK(c == doctest::Approx(420.0).epsilon(0.01));
    // A huge step would overshoot below ambient without the clamp.
    CHECK(m.step(1000, 0, 10 * kHour) == 420.0);
  }
}

TEST_CASE("scenario file parsing") {
  SUBCASE("built-in text and shipped file describe the same scenario") {
    const auto path = fs::path(ZGW_SOURCE_DIR) / "scenarios" / "office.toml";
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == builtin_scenario_text("office"));
    const auto cfg = resolve_scenario(path.string());
    CHECK(cfg.devices.size() == 10);
    CHECK(resolve_scenario("office").devices.size() == 10);
  }
  SUBCASE("the office deployment has two of each class split across two offices") {
    const auto cfg = office();
    std::map<std::pair<DeviceClass, int>, int> per;
    for (const auto& d : cfg.devices) ++per[{d.device_class, d.office}];
    CHECK(per.size() == 10);
    CHECK(cfg.walls.size() == 2);
    REQUIRE(cfg.relocations.size() == 1);
    CHECK(cfg.relocations[0].at_s == 48 * kHour);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(resolve_scenario("no-such-scenario"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("name = "), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(R"([[devices]]
name = "x"
class = "toaster"
ieee = "0x0000000000000001"
position = [1, 1]
credential = "0011"
)"),
                    ScenarioError);
    auto cfg = office();
    cfg.devices[1].name = cfg.devices[0].name;
    CHECK_THROWS_AS(CaseStudy{cfg}, ScenarioError);
    cfg = office();
    cfg.devices[0].credential = "|ZGW|00|";
    CHECK_THROWS_AS(CaseStudy{cfg}, ScenarioError);
  }
}

TEST_CASE("pairing window admits all ten devices and no routers") {
  CaseStudy study(office());
  study.run_until(study.config().pairing.permit_join_s + 10);
  CHECK(study.joined_count() == 10);
  CHECK(study.router_count() == 0);
  CHECK_FALSE(study.network().permit_join_open());
  CHECK(study.gateway().devices().size() == 10);
  for (const auto& spec : study.config().devices) {
    CHECK(study.gateway().registry().find(spec.name) != nullptr);
  }

  CaseStudy again(office());
  again.run_until(study.now());
  CHECK(again.join_order() == study.join_order());
}

TEST_CASE("a device that misses the window stays out") {
  auto cfg = office();
  cfg.pairing.join_spacing_s = 40;  // the tenth device would start at 365 s
  CaseStudy study(cfg);
  study.run_until(600);
  CHECK(study.joined_count() < 10);
  CHECK(study.joined_count() >= 6);
}

TEST_CASE("96 hour run: traffic shape, conservation, relocation, determinism") {
  CaseStudy study(office());
  study.run_until(96 * kHour);
  const auto r = study.report();

  CHECK(r["devices_joined"] == 10);
  CHECK(r["routers"] == 0);
  CHECK(r["hourly_messages"].size() == 96);
  CHECK(r["conservation"]["balanced"] == true);
  CHECK(r["totals"]["reports_delivered"] == r["network"]["delivered"]);
  CHECK(r["totals"]["report_failures"] == 0);

  const auto& occ = r["occupancy"];
  CHECK(occ["occupied_hours"] == 18);
  CHECK(occ["ratio"].get<double>() >= 2.0);

  // Days 3 and 4 busier than days 1 and 2.
  std::size_t low = 0, high = 0;
  for (std::size_t h = 0; h < 96; ++h) (h < 48 ? low : high) += r["hourly_messages"][h].get<std::size_t>();
  CHECK(high > low);

  const auto& move = r["relocations"][0];
  CHECK(move["device"] == "office1_co2");
  CHECK(move["lqi_mean_after"].get<double>() < move["lqi_mean_before"].get<double>());
  CHECK(move["samples_before"].get<int>() > 100);
  CHECK(move["samples_after"].get<int>() > 100);

  CaseStudy again(office());
  again.run_until(96 * kHour);
  CHECK(again.report()["checksum"] == r["checksum"]);

  auto other = office();
  other.seed = 2;
  CaseStudy different(other);
  different.run_until(96 * kHour);
  CHECK(different.report()["checksum"] != r["checksum"]);
}

TEST_CASE("occupied hours carry at least twice the idle traffic for ten seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = office();
    cfg.seed = seed;
    CaseStudy study(cfg);
    study.run_until(96 * kHour);
    const double ratio = study.report()["occupancy"]["ratio"].get<double>();
    INFO("seed " << seed << " ratio " << ratio);
    CHECK(ratio >= 2.0);
  }
}

TEST_CASE("empty offices produce only cadence reports") {
  auto cfg = office();
  cfg.schedule.constant_occupants = 0;
  cfg.relocations.clear();
  CaseStudy study(cfg);
  study.run_until(48 * kHour);
  std::size_t contact = 0;
  for (const auto& name : {"office1_contact", "office2_contact"}) {
    contact += study.lqi_summary(name, 0, 48 * kHour).count;
  }
  CHECK(contact == 0);
  // Motion only from the idle rate: 0.5/h over 48 h, two sensors, two reports each.
  const auto motion = study.lqi_summary("office1_motion", 0, 48 * kHour).count +
                      study.lqi_summary("office2_motion", 0, 48 * kHour).count;
  CHECK(motion < 4 * 48 * 0.5 * 2);
  // CO2 stays at ambient, so only the 15 minute heartbeat reports it.
  const auto co2 = study.telemetry().query(telemetry::state_series("office1_co2", "co2"), 0, 48 * kHour);
  CHECK(co2.size() <= 48 * 4 + 1);
  for (const auto& s : co2) CHECK(s.value == 420.0);
}

TEST_CASE("CO2 steady state under constant occupancy matches the fixed point") {
  auto cfg = office();
  cfg.schedule.constant_occupants = 1;
  CaseStudy study(cfg);
  study.run_until(24 * kHour);
  const double expected = cfg.rates.co2_ambient_ppm + cfg.rates.co2_k_occ / cfg.rates.co2_k_vent;
  CHECK(std::abs(study.co2("office2_co2") - expected) / expected < 0.02);
  const auto reported = study.telemetry().last(telemetry::state_series("office2_co2", "co2"));
  REQUIRE(reported);
  CHECK(std::abs(reported->value - expected) / expected < 0.02);
}

TEST_CASE("CO2 relaxes toward ambient after the office empties") {
  CaseStudy study(office());
  // Day 2 ends at 17:00; follow office2 through the night.
  study.run_until(2 * 24 * kHour + 17 * kHour);
  double prev = study.co2("office2_co2");
  CHECK(prev > 600);
  while (study.now() < 3 * 24 * kHour + 7 * kHour) {
    study.run_until(study.now() + study.config().tick_s);
    const double c = study.co2("office2_co2");
    CHECK(c <= prev + 1.0);
    CHECK(c >= 420.0);
    prev = c;
  }
}

TEST_CASE("relocation to the same position leaves the trace unchanged in distribution") {
  auto cfg = office();
  cfg.relocations.clear();
  const auto& dev = cfg.devices[4];
  cfg.relocations.push_back({dev.name, 48 * kHour, dev.position, dev.office});
  CaseStudy study(cfg);
  study.run_until(96 * kHour);
  const auto before = study.lqi_summary(dev.name, 0, 48 * kHour);
  const auto after = study.lqi_summary(dev.name, 48 * kHour, 96 * kHour);
  CHECK(std::abs(before.mean - after.mean) < 1.0);
}

TEST_CASE("relocation out of range makes the device unreachable") {
  CaseStudy study(office());
  study.run_until(1 * kHour);
  study.relocate("office1_co2", {500, 500}, 1 * kHour);
  const auto delivered = study.network().stats().delivered;
  study.run_until(3 * kHour);
  const auto r = study.report();
  CHECK(r["totals"]["report_failures"].get<int>() > 0);
  CHECK(study.lqi_summary("office1_co2", 1 * kHour + 1, 3 * kHour).count == 0);
  CHECK(study.network().stats().delivered > delivered);
  CHECK_THROWS_AS(study.relocate("ghost", {0, 0}, 0), ScenarioError);
}

TEST_CASE("setpoint over MQTT reaches the thermostat and comes back as state") {
  CaseStudy study(office());
  study.run_until(10 * 60);
  std::vector<mqtt::Publish> seen;
  mqtt::LocalClient operator_client(study.broker(), "operator",
                                    [&](const mqtt::Publish& p) { seen.push_back(p); }, study.now());
  operator_client.subscribe("gw/office1_thermostat", 0, study.now());
  seen.clear();
  operator_client.publish("gw/office1_thermostat/set", R"({"occupied_heating_setpoint": 23.5})", 1, false,
                          study.now());
  study.run_until(study.now() + 30);
  bool found = false;
  for (const auto& p : seen) {
    const auto state = json::parse(p.payload);
    if (state.contains("occupied_heating_setpoint") &&
        std::abs(state["occupied_heating_setpoint"].get<double>() - 23.5) <= 0.01) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("run_to_directory writes report, telemetry and registry") {
  const auto dir = fs::temp_directory_path() / "zgw_test_scenario_run";
  fs::remove_all(dir);
  const auto r = run_to_directory(office(), 6, dir);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "registry.json"));
  const auto reopened = telemetry::TelemetryStore(dir / "telemetry.ndjson");
  CHECK(reopened.size(telemetry::kMessagesSeries) > 0);
  CHECK(reopened.has_series("lqi.office1_co2"));
  const auto again = run_to_directory(office(), 6, dir);
  CHECK(again["checksum"] == r["checksum"]);
  CHECK(telemetry::TelemetryStore(dir / "telemetry.ndjson").size(telemetry::kMessagesSeries) ==
        reopened.size(telemetry::kMessagesSeries));
}
