#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "zgw/install_code/credential.hpp"
#include "zgw/scenario/scenario.hpp"

namespace zgw::scenario {

using nlohmann::json;

struct CaseStudy::Device {
  DeviceSpec spec;
  install_code::LinkKey key;
  std::mt19937_64 rng;
  int office = 1;
  bool joined = false;
  double setpoint_c = 21.0;
  double co2_ppm = 420.0;
  double co2_reported = 420.0;
  double co2_reported_at = 0.0;
  std::uint64_t motion_generation = 0;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

namespace {

sim::NetworkConfig network_config(const ScenarioConfig& cfg) {
  sim::NetworkConfig net;
  net.seed = cfg.seed;
  net.radio = cfg.radio;
  net.pending = cfg.pending;
  net.walls = cfg.walls;
  net.retain_events = false;
  net.nodes.push_back({sim::IeeeAddr{0x00124b0000000001}, sim::Role::Coordinator, cfg.coordinator, false, 0, ""});
  for (const auto& d : cfg.devices) {
    net.nodes.push_back({d.ieee, sim::Role::EndDevice, d.position, true, d.poll_interval_s,
                         std::string(model_for(d.device_class))});
  }
  return net;
}

std::unique_ptr<telemetry::TelemetryStore> open_store(const std::filesystem::path& file) {
  if (file.empty()) return std::make_unique<telemetry::TelemetryStore>();
  return std::make_unique<telemetry::TelemetryStore>(file);
}

// FNV-1a, 64 bit: stable across platforms, unlike std::hash.
class Fnv64 {
 public:
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    add(std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)));
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

CaseStudy::CaseStudy(ScenarioConfig config, const std::filesystem::path& telemetry_file,
                     const std::filesystem::path& registry_file, std::string base)
    : config_(std::move(config)),
      network_(sim::Network::form(network_config(config_))),
      telemetry_(open_store(telemetry_file)) {
  gateway::GatewayOptions opts;
  opts.registry_path = registry_file;
  opts.base = std::move(base);
  gateway_ = std::make_unique<gateway::Gateway>(opts, network_, broker_, *telemetry_, conv::builtin_catalog());

  for (std::size_t i = 0; i < config_.devices.size(); ++i) {
    const auto& spec = config_.devices[i];
    if (by_name_.count(spec.name)) {
      throw ScenarioError(ScenarioErrc::InvalidScenario, "duplicate device name " + spec.name);
    }
    auto d = std::make_unique<Device>();
    d->spec = spec;
    d->office = spec.office;
    d->setpoint_c = config_.rates.setpoint_c;
    d->co2_ppm = d->co2_reported = config_.rates.co2_ambient_ppm;
    std::seed_seq seq{config_.seed, static_cast<std::uint64_t>(i + 1), std::uint64_t{0x5EED}};
    d->rng.seed(seq);
    try {
      const auto cred = install_code::parse_qr_payload(spec.credential);
      d->key = install_code::derive_link_key(cred);
      // Out-of-band registration with the Trust Center before pairing.
      network_.register_credential(spec.ieee, cred);
    } catch (const install_code::CredentialError& e) {
      throw ScenarioError(ScenarioErrc::InvalidScenario, spec.name + ": " + e.what());
    }
    by_name_[spec.name] = d.get();
    by_ieee_[spec.ieee] = d.get();
    devices_.push_back(std::move(d));
  }

  network_.subscribe([this](const sim::SimEvent& e) { on_network_event(e); });
  plan_pairing();
  for (const auto& move : config_.relocations) {
    if (!by_name_.count(move.device)) {
      throw ScenarioError(ScenarioErrc::UnknownDevice, "relocation of " + move.device);
    }
    relocate(move.device, move.position, move.at_s, move.office);
  }
}

CaseStudy::~CaseStudy() {
  gateway_.reset();
  if (telemetry_) telemetry_->flush();
}

void CaseStudy::schedule(double t, std::function<void()> fn) {
  network_.schedule_at(std::max(t, network_.now()), std::move(fn));
}

void CaseStudy::run_until(double t_s) {
  while (network_.now() < t_s) {
    const double dt = std::min(config_.tick_s, t_s - network_.now());
    if (dt <= 1e-9) break;
    network_.tick(dt);
  }
}

// --- pairing ------------------------------------------------------------------------

void CaseStudy::plan_pairing() {
  if (config_.pairing.auto_permit) gateway_->permit_join(config_.pairing.permit_join_s);
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    // Batteries go in one after another while the gateway is in pairing mode.
    schedule(config_.pairing.first_join_s + config_.pairing.join_spacing_s * static_cast<double>(i),
             [this, i] { try_join(i); });
  }
}

void CaseStudy::try_join(std::size_t index) {
  Device& d = *devices_[index];
  if (d.joined) return;
  const auto outcome = network_.join(d.spec.ieee, d.key);
  if (outcome.status == sim::JoinStatus::Joined) {
    d.joined = true;
    join_order_.push_back(d.spec.name);
    const auto* record = gateway_->registry().find(d.spec.ieee);
    if (record && record->friendly_name != d.spec.name) gateway_->rename(record->friendly_name, d.spec.name);
    start_behaviour(d);
    return;
  }
  if (network_.permit_join_open() || !config_.pairing.auto_permit) {
    schedule(network_.now() + config_.pairing.retry_s, [this, index] { try_join(index); });
  }
}

// --- behaviour ------------------------------------------------------------------------

void CaseStudy::send_report(Device& d, std::vector<AttributeReport> attrs) {
  if (!d.joined || attrs.empty()) return;
  const auto& node = network_.node(d.spec.ieee);
  if (!node.joined()) return;
  sim::Frame f;
  f.src = *node.short_addr;
  f.dst = sim::kCoordinatorAddr;
  f.cluster_id = attrs.front().cluster_id;
  f.kind = sim::FrameKind::Report;
  f.attributes = std::move(attrs);
  ++reports_sent_;
  try {
    network_.deliver(std::move(f));
  } catch (const sim::SimError&) {
    ++report_failures_;
  }
}

void CaseStudy::schedule_poisson(Device& d, double peak_per_h, std::function<double(double)> rate_per_h,
                                 std::function<void()> on_event) {
  if (!(peak_per_h > 0)) return;
  // Thinning: candidates at the peak rate, each kept with probability
  // rate(t) / peak, gives the time-varying Poisson process exactly.
  const double gap = std::exponential_distribution<double>(peak_per_h / 3600.0)(d.rng);
  Device* dev = &d;
  schedule(network_.now() + gap, [this, dev, peak_per_h, rate_per_h, on_event] {
    if (dev->uniform(0.0, 1.0) < rate_per_h(network_.now()) / peak_per_h) on_event();
    schedule_poisson(*dev, peak_per_h, rate_per_h, on_event);
  });
}

void CaseStudy::climate_tick(Device& d) {
  const int occ = occupants(d.office, network_.now());
  if (d.spec.device_class == DeviceClass::Thermostat) {
    const double temp = d.setpoint_c - 0.8 + 0.3 * occ + d.uniform(-0.15, 0.15);
    send_report(d, {{cluster::kThermostat, 0x0000, std::llround(temp * 100.0)},
                    {cluster::kThermostat, 0x0012, std::llround(d.setpoint_c * 100.0)}});
  } else {
    const double voc = std::clamp(60.0 + 45.0 * occ + d.uniform(-10.0, 10.0), 0.0, 500.0);
    send_report(d, {{cluster::kAnalogInput, 0x0055, std::llround(voc)}});
  }
  Device* dev = &d;
  schedule(network_.now() + config_.rates.climate_interval_s, [this, dev] { climate_tick(*dev); });
}

void CaseStudy::co2_tick(Device& d) {
  const Co2Model model{config_.rates.co2_ambient_ppm, config_.rates.co2_k_occ, config_.rates.co2_k_vent};
  const double now = network_.now();
  d.co2_ppm = model.step(d.co2_ppm, occupants(d.office, now), config_.tick_s);
  if (std::abs(d.co2_ppm - d.co2_reported) >= config_.rates.co2_report_delta_ppm ||
      now - d.co2_reported_at >= config_.rates.co2_max_interval_s) {
    d.co2_reported = d.co2_ppm;
    d.co2_reported_at = now;
    send_report(d, {{cluster::kCo2, 0x0000, std::llround(d.co2_ppm)}});
  }
  Device* dev = &d;
  schedule(now + config_.tick_s, [this, dev] { co2_tick(*dev); });
}

void CaseStudy::co2_climate_tick(Device& d) {
  const int occ = occupants(d.office, network_.now());
  const double temp = 21.5 + 0.3 * occ + d.uniform(-0.2, 0.2);
  const double humidity = 40.0 + 3.0 * occ + d.uniform(-1.0, 1.0);
  send_report(d, {{cluster::kTemperature, 0x0000, std::llround(temp * 100.0)},
                  {cluster::kHumidity, 0x0000, std::llround(humidity * 100.0)}});
  Device* dev = &d;
  schedule(network_.now() + config_.rates.co2_climate_interval_s, [this, dev] { co2_climate_tick(*dev); });
}

void CaseStudy::start_behaviour(Device& d) {
  const double now = network_.now();
  const auto& r = config_.rates;
  Device* dev = &d;
  switch (d.spec.device_class) {
    case DeviceClass::Thermostat:
    case DeviceClass::AirQuality:
      schedule(now + d.uniform(0.0, r.climate_interval_s), [this, dev] { climate_tick(*dev); });
      break;
    case DeviceClass::Co2:
      d.co2_reported_at = now;
      schedule(now + config_.tick_s, [this, dev] { co2_tick(*dev); });
      schedule(now + d.uniform(0.0, r.co2_climate_interval_s), [this, dev] { co2_climate_tick(*dev); });
      break;
    case DeviceClass::Motion: {
      const double peak = std::max(r.motion_occupied_per_h, r.motion_idle_per_h);
      schedule_poisson(
          d, peak,
          [this, dev](double t) {
            return occupants(dev->office, t) > 0 ? config_.rates.motion_occupied_per_h
                                                 : config_.rates.motion_idle_per_h;
          },
          [this, dev] {
            send_report(*dev, {{cluster::kOccupancy, 0x0000, true}});
            const auto generation = ++dev->motion_generation;
            schedule(network_.now() + config_.rates.motion_clear_s, [this, dev, generation] {
              if (dev->motion_generation == generation) send_report(*dev, {{cluster::kOccupancy, 0x0000, false}});
            });
          });
      break;
    }
    case DeviceClass::Contact:
      schedule_poisson(
          d, r.contact_occupied_per_h,
          [this, dev](double t) { return occupants(dev->office, t) > 0 ? config_.rates.contact_occupied_per_h : 0.0; },
          [this, dev] {
            send_report(*dev, {{cluster::kIasZone, 0x0002, false}});
            schedule(network_.now() + config_.rates.contact_open_s,
                     [this, dev] { send_report(*dev, {{cluster::kIasZone, 0x0002, true}}); });
          });
      break;
  }
}

void CaseStudy::on_network_event(const sim::SimEvent& e) {
  if (e.kind != sim::EventKind::FrameDelivered || !e.frame || e.frame->kind != sim::FrameKind::WriteAttributes ||
      !e.ieee) {
    return;
  }
  auto it = by_ieee_.find(*e.ieee);
  if (it == by_ieee_.end()) return;
  Device* dev = it->second;
  if (dev->spec.device_class != DeviceClass::Thermostat) return;
  bool changed = false;
  for (const auto& a : e.frame->attributes) {
    if (a.cluster_id == cluster::kThermostat && a.attribute_id == 0x0012) {
      if (const auto* raw = std::get_if<std::int64_t>(&a.raw_value)) {
        dev->setpoint_c = static_cast<double>(*raw) / 100.0;
        changed = true;
      }
    }
  }
  // Confirm the new setpoint right away, as thermostats do after a write.
  if (changed) {
    schedule(network_.now(), [this, dev] {
      const int occ = occupants(dev->office, network_.now());
      const double temp = dev->setpoint_c - 0.8 + 0.3 * occ;
      send_report(*dev, {{cluster::kThermostat, 0x0000, std::llround(temp * 100.0)},
                         {cluster::kThermostat, 0x0012, std::llround(dev->setpoint_c * 100.0)}});
    });
  }
}

void CaseStudy::relocate(const std::string& name, sim::Position position, double t_s, std::optional<int> office) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ScenarioError(ScenarioErrc::UnknownDevice, name);
  Device* dev = it->second;
  schedule(t_s, [this, dev, position, office] {
    const auto from = network_.node(dev->spec.ieee).config.position;
    network_.set_position(dev->spec.ieee, position);
    if (office) dev->office = *office;
    relocation_log_.push_back({{"device", dev->spec.name},
                               {"at_s", network_.now()},
                               {"from", {from.x, from.y}},
                               {"to", {position.x, position.y}}});
  });
}

// --- reporting --------------------------------------------------------------------------

double CaseStudy::co2(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ScenarioError(ScenarioErrc::UnknownDevice, name);
  return it->second->co2_ppm;
}

std::size_t CaseStudy::joined_count() const {
  std::size_t n = 0;
  for (const auto* node : network_.nodes()) {
    if (node->joined() && node->config.role != sim::Role::Coordinator) ++n;
  }
  return n;
}

std::size_t CaseStudy::router_count() const {
  std::size_t n = 0;
  for (const auto* node : network_.nodes()) {
    if (node->config.role == sim::Role::Router) ++n;
  }
  return n;
}

LqiSummary CaseStudy::lqi_summary(const std::string& name, double t0, double t1) const {
  LqiSummary s;
  if (!telemetry_->has_series(telemetry::lqi_series(name))) return s;
  const auto samples = telemetry_->lqi_trace(name, t0, t1);
  if (samples.empty()) return s;
  double sum = 0;
  s.min = 255;
  for (const auto& p : samples) {
    sum += p.value;
    s.min = std::min(s.min, static_cast<int>(p.value));
    s.max = std::max(s.max, static_cast<int>(p.value));
  }
  s.count = samples.size();
  s.mean = sum / static_cast<double>(s.count);
  return s;
}

json CaseStudy::report() const {
  const double end = network_.now();
  const auto& counters = gateway_->counters();
  json r;
  r["scenario"] = config_.name;
  r["seed"] = config_.seed;
  r["hours"] = end / 3600.0;
  r["devices_joined"] = joined_count();
  r["routers"] = router_count();
  r["join_order"] = join_order_;

  std::vector<telemetry::HourCount> hourly;
  if (telemetry_->has_series(telemetry::kMessagesSeries)) {
    hourly = telemetry_->hourly_count(telemetry::kMessagesSeries, 0, end);
  }
  json counts = json::array();
  std::size_t total = 0;
  double occ_sum = 0, idle_sum = 0;
  std::size_t occ_hours = 0, idle_hours = 0;
  for (const auto& h : hourly) {
    counts.push_back(h.count);
    total += h.count;
    // Only whole hours enter the occupancy comparison.
    if (static_cast<double>(h.hour + 1) * 3600.0 > end + 1e-9) continue;
    const double mid = static_cast<double>(h.hour) * 3600.0 + 1800.0;
    bool occupied = false;
    for (const auto& d : devices_) occupied |= occupants(d->office, mid) > 0;
    if (occupied) {
      occ_sum += static_cast<double>(h.count);
      ++occ_hours;
    } else {
      idle_sum += static_cast<double>(h.count);
      ++idle_hours;
    }
  }
  r["hourly_messages"] = counts;
  const double occ_mean = occ_hours ? occ_sum / static_cast<double>(occ_hours) : 0.0;
  const double idle_mean = idle_hours ? idle_sum / static_cast<double>(idle_hours) : 0.0;
  r["occupancy"] = {{"occupied_hours", occ_hours},
                    {"idle_hours", idle_hours},
                    {"occupied_mean", occ_mean},
                    {"idle_mean", idle_mean},
                    {"ratio", idle_mean > 0 ? occ_mean / idle_mean : 0.0}};

  r["totals"] = {{"messages", total},
                 {"reports_sent", reports_sent_},
                 {"report_failures", report_failures_},
                 {"reports_delivered", counters.reports_delivered},
                 {"state_publishes", counters.state_publishes},
                 {"bridge_events", counters.bridge_events},
                 {"converter_errors", counters.converter_errors},
                 {"commands", counters.commands}};
  r["conservation"] = {{"reports_delivered", counters.reports_delivered},
                       {"state_publishes", counters.state_publishes},
                       {"balanced", counters.reports_delivered == counters.state_publishes + counters.unsupported_reports}};

  json devices = json::array();
  for (const auto& d : devices_) {
    const auto* rec = gateway_->registry().find(d->spec.ieee);
    const std::string name = rec ? rec->friendly_name : d->spec.name;
    const auto lqi = lqi_summary(name, 0, end + 1);
    devices.push_back({{"name", name},
                       {"class", to_string(d->spec.device_class)},
                       {"office", d->office},
                       {"ieee_addr", d->spec.ieee.str()},
                       {"joined", d->joined},
                       {"joined_at", rec ? rec->joined_at : 0.0},
                       {"lqi", {{"count", lqi.count}, {"mean", lqi.mean}, {"min", lqi.min}, {"max", lqi.max}}}});
  }
  r["devices"] = devices;

  json moves = json::array();
  for (auto move : relocation_log_) {
    const double at = move["at_s"].get<double>();
    const std::string name = move["device"].get<std::string>();
    const auto before = lqi_summary(name, 0, at);
    const auto after = lqi_summary(name, at, end + 1);
    move["lqi_mean_before"] = before.mean;
    move["lqi_mean_after"] = after.mean;
    move["samples_before"] = before.count;
    move["samples_after"] = after.count;
    moves.push_back(move);
  }
  r["relocations"] = moves;

  const auto& s = network_.stats();
  r["network"] = {{"frames_created", s.created},
                  {"delivered", s.delivered},
                  {"dropped", s.dropped},
                  {"expired", s.expired},
                  {"pending", s.pending}};
  const auto& b = broker_.broker().stats();
  r["broker"] = {{"messages_received", b.messages_received},
                 {"messages_sent", b.messages_sent},
                 {"messages_dropped", b.messages_dropped}};

  Fnv64 h;
  h.add(r.dump());
  for (const auto& series : telemetry_->series_names()) {
    h.add(series);
    for (const auto& p : telemetry_->query(series, -1e300, 1e300)) {
      h.add(p.t);
      h.add(p.value);
    }
  }
  r["checksum"] = h.hex();
  return r;
}

json run_to_directory(ScenarioConfig config, double hours, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto telemetry_file = out_dir / "telemetry.ndjson";
  const auto registry_file = out_dir / "registry.json";
  std::filesystem::remove(telemetry_file);
  std::filesystem::remove(registry_file);
  json report;
  {
    CaseStudy study(std::move(config), telemetry_file, registry_file);
    study.run_until(hours * 3600.0);
    study.gateway().save_registry();
    report = study.report();
  }
  report["telemetry_path"] = std::filesystem::absolute(telemetry_file).string();
  report["registry_path"] = std::filesystem::absolute(registry_file).string();
  std::ofstream out(out_dir / "report.json", std::ios::trunc);
  out << report.dump(2) << '\n';
  return report;
}

}  // namespace zgw::scenario
