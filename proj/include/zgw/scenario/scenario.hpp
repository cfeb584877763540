#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zgw/common/error.hpp"
#include "zgw/gateway/gateway.hpp"
#include "zgw/mqtt/host.hpp"
#include "zgw/sim/network.hpp"
#include "zgw/telemetry/store.hpp"

namespace zgw::scenario {

enum class ScenarioErrc {
  InvalidScenario,
  UnknownScenario,
  UnknownDevice,
  NotJoined,
};

std::string_view to_string(ScenarioErrc code) noexcept;
using ScenarioError = Error<ScenarioErrc>;

enum class DeviceClass { Thermostat, AirQuality, Contact, Motion, Co2 };

std::string_view to_string(DeviceClass c) noexcept;
std::optional<DeviceClass> parse_device_class(std::string_view text);
std::string_view model_for(DeviceClass c) noexcept;

struct OccupancyOverride {
  int day = 0;
  int occupants = 0;
};

// Occupancy is a pure function of simulated time: overrides by day first,
// then office hours on weekdays.
struct OccupancySchedule {
  int start_weekday = 0;  // 0 = Monday
  int open_hour = 8;
  int close_hour = 17;
  int occupants_per_office = 2;
  std::vector<OccupancyOverride> overrides;
  // When set, every office holds this many occupants at all times.
  std::optional<int> constant_occupants;

  int occupants(int office, double t) const;
  // Next time after t at which occupants() may change.
  double next_change(double t) const;
};

struct Rates {
  double motion_occupied_per_h = 20.0;
  double motion_idle_per_h = 0.5;
  double motion_clear_s = 90.0;
  double contact_occupied_per_h = 2.0;
  double contact_open_s = 10.0;
  double co2_ambient_ppm = 420.0;
  double co2_k_occ = 300.0;
  double co2_k_vent = 0.7;
  double co2_report_delta_ppm = 25.0;
  double co2_max_interval_s = 900.0;
  double co2_climate_interval_s = 1800.0;
  double climate_interval_s = 600.0;
  double setpoint_c = 21.0;
};

// dC/dt = k_occ * n - k_vent * (C - ambient), time in hours.
struct Co2Model {
  double ambient_ppm = 420.0;
  double k_occ = 300.0;
  double k_vent = 0.7;

  double derivative(double c, int occupants) const noexcept;
  // One explicit Euler step of dt_s seconds, never below ambient.
  double step(double c, int occupants, double dt_s) const noexcept;
  double equilibrium(int occupants) const noexcept;
};

struct DeviceSpec {
  std::string name;
  DeviceClass device_class = DeviceClass::Co2;
  int office = 1;
  sim::IeeeAddr ieee;
  sim::Position position;
  double poll_interval_s = 7.0;
  std::string credential;
};

struct Relocation {
  std::string device;
  double at_s = 0;
  sim::Position position;
  std::optional<int> office;
};

struct PairingPlan {
  double permit_join_s = 254;
  double first_join_s = 5;
  double join_spacing_s = 12;
  double retry_s = 30;
  // When false nobody opens the window; devices keep retrying every retry_s
  // until an operator permits joining.
  bool auto_permit = true;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double hours = 96;
  double tick_s = 60;
  sim::RadioModel radio;
  sim::PendingConfig pending;
  sim::Position coordinator;
  std::vector<sim::Wall> walls;
  PairingPlan pairing;
  OccupancySchedule schedule;
  Rates rates;
  std::vector<DeviceSpec> devices;
  std::vector<Relocation> relocations;
};

ScenarioConfig parse_scenario(std::string_view toml_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
// Names of scenarios compiled into the binary ("office").
std::vector<std::string> builtin_scenarios();
std::string_view builtin_scenario_text(std::string_view name);
ScenarioConfig builtin_scenario(std::string_view name);
// A path to a TOML file, or the name of a built-in scenario.
ScenarioConfig resolve_scenario(std::string_view name_or_path);

struct LqiSummary {
  std::size_t count = 0;
  double mean = 0;
  int min = 0;
  int max = 0;
};

// The assembled case study: simulator, embedded broker, telemetry and gateway
// with scripted device behaviour on top.
class CaseStudy {
 public:
  // Telemetry goes to `telemetry_file` when given, else stays in memory.
  explicit CaseStudy(ScenarioConfig config, const std::filesystem::path& telemetry_file = {},
                     const std::filesystem::path& registry_file = {}, std::string base = "gw");
  ~CaseStudy();
  CaseStudy(const CaseStudy&) = delete;
  CaseStudy& operator=(const CaseStudy&) = delete;

  // Advances the simulator to absolute time t in tick_s steps.
  void run_until(double t_s);
  // Moves a device at simulated time t (now if t is in the past).
  void relocate(const std::string& name, sim::Position position, double t_s, std::optional<int> office = {});

  int occupants(int office, double t) const { return config_.schedule.occupants(office, t); }
  double co2(const std::string& name) const;
  std::vector<std::string> join_order() const { return join_order_; }
  std::size_t joined_count() const;
  std::size_t router_count() const;
  LqiSummary lqi_summary(const std::string& name, double t0, double t1) const;

  // Run summary; `checksum` covers everything except file paths.
  nlohmann::json report() const;

  const ScenarioConfig& config() const noexcept { return config_; }
  sim::Network& network() noexcept { return network_; }
  mqtt::BrokerHost& broker() noexcept { return broker_; }
  telemetry::TelemetryStore& telemetry() noexcept { return *telemetry_; }
  gateway::Gateway& gateway() noexcept { return *gateway_; }
  double now() const noexcept { return network_.now(); }

 private:
  struct Device;

  void schedule(double t, std::function<void()> fn);
  void plan_pairing();
  void try_join(std::size_t index);
  void start_behaviour(Device& d);
  void send_report(Device& d, std::vector<AttributeReport> attrs);
  void on_network_event(const sim::SimEvent& e);

  void schedule_poisson(Device& d, double peak_per_h, std::function<double(double)> rate_per_h,
                        std::function<void()> on_event);
  void climate_tick(Device& d);
  void co2_tick(Device& d);
  void co2_climate_tick(Device& d);

  ScenarioConfig config_;
  sim::Network network_;
  mqtt::BrokerHost broker_;
  std::unique_ptr<telemetry::TelemetryStore> telemetry_;
  std::unique_ptr<gateway::Gateway> gateway_;
  std::vector<std::unique_ptr<Device>> devices_;
  std::map<std::string, Device*> by_name_;
  std::map<sim::IeeeAddr, Device*> by_ieee_;
  std::vector<std::string> join_order_;
  std::uint64_t reports_sent_ = 0;
  std::uint64_t report_failures_ = 0;
  std::vector<nlohmann::json> relocation_log_;
};

// Writes report.json and telemetry.ndjson under out_dir and returns the
// report. Existing files in out_dir are replaced.
nlohmann::json run_to_directory(ScenarioConfig config, double hours, const std::filesystem::path& out_dir);

}  // namespace zgw::scenario
