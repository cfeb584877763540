#include <cmath>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "zgw/conv/definition.hpp"
#include "zgw/scenario/scenario.hpp"
#include "zgw/sim/topology.hpp"

namespace zgw::scenario {

std::string_view to_string(ScenarioErrc code) noexcept {
  switch (code) {
    case ScenarioErrc::InvalidScenario: return "InvalidScenario";
    case ScenarioErrc::UnknownScenario: return "UnknownScenario";
    case ScenarioErrc::UnknownDevice: return "UnknownDevice";
    case ScenarioErrc::NotJoined: return "NotJoined";
  }
  return "Unknown";
}

std::string_view to_string(DeviceClass c) noexcept {
  switch (c) {
    case DeviceClass::Thermostat: return "thermostat";
    case DeviceClass::AirQuality: return "air_quality";
    case DeviceClass::Contact: return "contact";
    case DeviceClass::Motion: return "motion";
    case DeviceClass::Co2: return "co2";
  }
  return "unknown";
}

std::optional<DeviceClass> parse_device_class(std::string_view text) {
  for (auto c : {DeviceClass::Thermostat, DeviceClass::AirQuality, DeviceClass::Contact, DeviceClass::Motion,
                 DeviceClass::Co2}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view model_for(DeviceClass c) noexcept {
  switch (c) {
    case DeviceClass::Thermostat: return conv::model::kThermostat;
    case DeviceClass::AirQuality: return conv::model::kAirQuality;
    case DeviceClass::Contact: return conv::model::kContact;
    case DeviceClass::Motion: return conv::model::kMotion;
    case DeviceClass::Co2: return conv::model::kCo2;
  }
  return {};
}

// --- occupancy and CO2 ----------------------------------------------------------

int OccupancySchedule::occupants(int /*office*/, double t) const {
  if (constant_occupants) return *constant_occupants;
  const auto day = static_cast<int>(std::floor(t / 86'400.0));
  for (const auto& o : overrides) {
    if (o.day == day) return o.occupants;
  }
  const int weekday = ((start_weekday + day) % 7 + 7) % 7;
  if (weekday >= 5) return 0;
  const double hour = (t - day * 86'400.0) / 3600.0;
  return hour >= open_hour && hour < close_hour ? occupants_per_office : 0;
}

double OccupancySchedule::next_change(double t) const {
  return (std::floor(t / 3600.0) + 1.0) * 3600.0;
}

double Co2Model::derivative(double c, int occupants) const noexcept {
  return k_occ * occupants - k_vent * (c - ambient_ppm);
}

double Co2Model::step(double c, int occupants, double dt_s) const noexcept {
  const double next = c + derivative(c, occupants) * dt_s / 3600.0;
  return std::max(next, ambient_ppm);
}

double Co2Model::equilibrium(int occupants) const noexcept { return ambient_ppm + k_occ * occupants / k_vent; }

// --- parsing ----------------------------------------------------------------------

namespace {

[[noreturn]] void bad(const std::string& what) { throw ScenarioError(ScenarioErrc::InvalidScenario, what); }

double number(const toml::table& t, std::string_view key, double fallback) {
  if (const auto* node = t.get(key)) {
    if (auto v = node->value<double>()) return *v;
    bad(std::string(key) + " must be a number");
  }
  return fallback;
}

sim::Position position(const toml::node* node, const std::string& what) {
  try {
    return sim::position_from_toml(node, what);
  } catch (const sim::SimError& e) {
    bad(e.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "line " << e.source().begin.line << ": " << e.description();
    bad(os.str());
  }

  ScenarioConfig cfg;
  cfg.name = root["name"].value_or(cfg.name);
  if (auto seed = root["seed"].value<std::int64_t>()) cfg.seed = static_cast<std::uint64_t>(*seed);
  cfg.hours = number(root, "hours", cfg.hours);
  cfg.tick_s = number(root, "tick_s", cfg.tick_s);
  if (!(cfg.tick_s > 0)) bad("tick_s must be positive");

  try {
    const auto net = sim::topology_from_toml(root);
    cfg.radio = net.radio;
    cfg.pending = net.pending;
  } catch (const sim::SimError& e) {
    bad(e.what());
  }

  if (const auto* geo = root["geometry"].as_table()) {
    cfg.coordinator = position(geo->get("coordinator"), "geometry.coordinator");
    if (const auto* walls = (*geo)["walls"].as_array()) {
      for (const auto& w : *walls) {
        const auto* wt = w.as_table();
        if (!wt) bad("geometry.walls entries must be tables");
        cfg.walls.push_back({position(wt->get("from"), "wall.from"), position(wt->get("to"), "wall.to")});
      }
    }
  }

  if (const auto* p = root["pairing"].as_table()) {
    cfg.pairing.permit_join_s = number(*p, "permit_join_s", cfg.pairing.permit_join_s);
    cfg.pairing.first_join_s = number(*p, "first_join_s", cfg.pairing.first_join_s);
    cfg.pairing.join_spacing_s = number(*p, "join_spacing_s", cfg.pairing.join_spacing_s);
    cfg.pairing.retry_s = number(*p, "retry_s", cfg.pairing.retry_s);
    cfg.pairing.auto_permit = (*p)["auto_permit"].value_or(cfg.pairing.auto_permit);
    if (!(cfg.pairing.permit_join_s >= 0 && cfg.pairing.permit_join_s <= 254)) {
      bad("pairing.permit_join_s must be within [0, 254]");
    }
    if (!(cfg.pairing.retry_s > 0)) bad("pairing.retry_s must be positive");
  }

  if (const auto* s = root["schedule"].as_table()) {
    auto& sch = cfg.schedule;
    sch.start_weekday = static_cast<int>((*s)["start_weekday"].value_or(std::int64_t{sch.start_weekday}));
    if (const auto* hours = (*s)["office_hours"].as_array()) {
      if (hours->size() != 2) bad("schedule.office_hours must be [open, close]");
      sch.open_hour = static_cast<int>((*hours)[0].value_or(std::int64_t{8}));
      sch.close_hour = static_cast<int>((*hours)[1].value_or(std::int64_t{17}));
    }
    sch.occupants_per_office =
        static_cast<int>((*s)["occupants_per_office"].value_or(std::int64_t{sch.occupants_per_office}));
    if (auto c = (*s)["constant_occupants"].value<std::int64_t>()) sch.constant_occupants = static_cast<int>(*c);
    if (const auto* ov = (*s)["overrides"].as_array()) {
      for (const auto& o : *ov) {
        const auto* ot = o.as_table();
        if (!ot) bad("schedule.overrides entries must be tables");
        auto day = (*ot)["day"].value<std::int64_t>();
        auto occ = (*ot)["occupants"].value<std::int64_t>();
        if (!day || !occ || *occ < 0) bad("schedule.overrides entries need day and occupants >= 0");
        sch.overrides.push_back({static_cast<int>(*day), static_cast<int>(*occ)});
      }
    }
  }

  if (const auto* r = root["rates"].as_table()) {
    auto& k = cfg.rates;
    k.motion_occupied_per_h = number(*r, "motion_occupied_per_h", k.motion_occupied_per_h);
    k.motion_idle_per_h = number(*r, "motion_idle_per_h", k.motion_idle_per_h);
    k.motion_clear_s = number(*r, "motion_clear_s", k.motion_clear_s);
    k.contact_occupied_per_h = number(*r, "contact_occupied_per_h", k.contact_occupied_per_h);
    k.contact_open_s = number(*r, "contact_open_s", k.contact_open_s);
    k.co2_ambient_ppm = number(*r, "co2_ambient_ppm", k.co2_ambient_ppm);
    k.co2_k_occ = number(*r, "co2_k_occ", k.co2_k_occ);
    k.co2_k_vent = number(*r, "co2_k_vent", k.co2_k_vent);
    k.co2_report_delta_ppm = number(*r, "co2_report_delta_ppm", k.co2_report_delta_ppm);
    k.co2_max_interval_s = number(*r, "co2_max_interval_s", k.co2_max_interval_s);
    k.co2_climate_interval_s = number(*r, "co2_climate_interval_s", k.co2_climate_interval_s);
    k.climate_interval_s = number(*r, "climate_interval_s", k.climate_interval_s);
    k.setpoint_c = number(*r, "setpoint_c", k.setpoint_c);
    for (double v : {k.motion_clear_s, k.contact_open_s, k.co2_max_interval_s, k.co2_climate_interval_s,
                     k.climate_interval_s, k.co2_k_vent}) {
      if (!(v > 0)) bad("rates: cadences and k_vent must be positive");
    }
    if (k.motion_occupied_per_h < 0 || k.motion_idle_per_h < 0 || k.contact_occupied_per_h < 0) {
      bad("rates: event rates must be non-negative");
    }
  }

  if (const auto* devices = root["devices"].as_array()) {
    for (const auto& d : *devices) {
      const auto* dt = d.as_table();
      if (!dt) bad("devices entries must be tables");
      DeviceSpec spec;
      auto name = (*dt)["name"].value<std::string>();
      if (!name) bad("device without name");
      spec.name = *name;
      auto cls = parse_device_class((*dt)["class"].value_or(std::string{}));
      if (!cls) bad("device " + spec.name + ": unknown class");
      spec.device_class = *cls;
      spec.office = static_cast<int>((*dt)["office"].value_or(std::int64_t{1}));
      auto ieee = sim::IeeeAddr::parse((*dt)["ieee"].value_or(std::string{}));
      if (!ieee) bad("device " + spec.name + ": bad ieee address");
      spec.ieee = *ieee;
      spec.position = position(dt->get("position"), "position of " + spec.name);
      spec.poll_interval_s = number(*dt, "poll_interval_s", spec.poll_interval_s);
      if (!(spec.poll_interval_s > 0)) bad("device " + spec.name + ": poll_interval_s must be positive");
      auto cred = (*dt)["credential"].value<std::string>();
      if (!cred) bad("device " + spec.name + ": missing credential");
      spec.credential = *cred;
      cfg.devices.push_back(std::move(spec));
    }
  }

  if (const auto* rel = root["relocations"].as_array()) {
    for (const auto& r : *rel) {
      const auto* rt = r.as_table();
      if (!rt) bad("relocations entries must be tables");
      Relocation move;
      move.device = (*rt)["device"].value_or(std::string{});
      move.at_s = number(*rt, "at_h", 0.0) * 3600.0;
      move.position = position(rt->get("position"), "relocation position");
      if (auto office = (*rt)["office"].value<std::int64_t>()) move.office = static_cast<int>(*office);
      cfg.relocations.push_back(std::move(move));
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ScenarioErrc::UnknownScenario, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {
constexpr std::string_view kOfficeToml =
#include "office_toml.inc"
    ;
}  // namespace

std::vector<std::string> builtin_scenarios() { return {"office"}; }

std::string_view builtin_scenario_text(std::string_view name) {
  if (name == "office") return kOfficeToml;
  throw ScenarioError(ScenarioErrc::UnknownScenario, name);
}

ScenarioConfig builtin_scenario(std::string_view name) { return parse_scenario(builtin_scenario_text(name)); }

ScenarioConfig resolve_scenario(std::string_view name_or_path) {
  const std::filesystem::path p{std::string(name_or_path)};
  if (std::filesystem::exists(p)) return load_scenario(p);
  for (const auto& n : builtin_scenarios()) {
    if (n == name_or_path) return builtin_scenario(n);
  }
  throw ScenarioError(ScenarioErrc::UnknownScenario, name_or_path);
}

}  // namespace zgw::scenario
