#include "zgw/net/runtime.hpp"

#include <sstream>

#include <toml.hpp>

namespace zgw::net {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw scenario::ScenarioError(scenario::ScenarioErrc::InvalidScenario, what);
}

std::uint16_t port_of(const toml::table& t, std::string_view key, std::uint16_t fallback) {
  const auto v = t[key].value<std::int64_t>();
  if (!v) return fallback;
  if (*v < 0 || *v > 65535) bad(std::string(key) + " out of range");
  return static_cast<std::uint16_t>(*v);
}

RuntimeConfig from_table(const toml::table& root) {
  RuntimeConfig cfg;
  if (const auto* m = root["mqtt"].as_table()) {
    cfg.mqtt_bind = (*m)["bind"].value_or(cfg.mqtt_bind);
    cfg.mqtt_port = port_of(*m, "port", cfg.mqtt_port);
  }
  if (const auto* h = root["http"].as_table()) {
    cfg.http_bind = (*h)["bind"].value_or(cfg.http_bind);
    cfg.http_port = port_of(*h, "port", cfg.http_port);
    cfg.http.heartbeat_s = (*h)["heartbeat_s"].value_or(cfg.http.heartbeat_s);
    if (auto dir = (*h)["static_dir"].value<std::string>()) cfg.http.static_dir = *dir;
    if (!(cfg.http.heartbeat_s > 0)) bad("http.heartbeat_s must be positive");
  }
  if (const auto* g = root["gateway"].as_table()) {
    cfg.base = (*g)["base"].value_or(cfg.base);
    if (auto p = (*g)["registry"].value<std::string>()) cfg.registry = *p;
    if (auto p = (*g)["telemetry"].value<std::string>()) cfg.telemetry = *p;
  }
  if (const auto* s = root["simulation"].as_table()) {
    cfg.scenario = (*s)["scenario"].value_or(cfg.scenario);
    if (auto seed = (*s)["seed"].value<std::int64_t>()) cfg.seed = static_cast<std::uint64_t>(*seed);
    if (auto ap = (*s)["auto_permit"].value<bool>()) cfg.auto_permit = *ap;
    cfg.time_scale = (*s)["time_scale"].value_or(cfg.time_scale);
    cfg.step_ms = (*s)["step_ms"].value_or(cfg.step_ms);
    if (!(cfg.time_scale > 0)) bad("simulation.time_scale must be positive");
    if (!(cfg.step_ms > 0)) bad("simulation.step_ms must be positive");
  }
  if (const auto* u = root["uplink"].as_table()) {
    UplinkConfig up;
    up.host = (*u)["host"].value_or(up.host);
    up.port = port_of(*u, "port", up.port);
    up.client_id = (*u)["client_id"].value_or(up.client_id);
    up.retry_s = (*u)["retry_s"].value_or(up.retry_s);
    if (const auto* topics = (*u)["topics"].as_array()) {
      up.topics.clear();
      for (const auto& t : *topics) {
        auto s = t.value<std::string>();
        if (!s) bad("uplink.topics must be strings");
        up.topics.push_back(*s);
      }
    }
    if (auto cap = (*u)["capacity"].value<std::int64_t>()) {
      if (*cap <= 0) bad("uplink.capacity must be positive");
      up.buffer.capacity = static_cast<std::size_t>(*cap);
    }
    if (auto w = (*u)["inflight_window"].value<std::int64_t>()) {
      if (*w <= 0) bad("uplink.inflight_window must be positive");
      up.buffer.inflight_window = static_cast<std::size_t>(*w);
    }
    if (!(up.retry_s > 0)) bad("uplink.retry_s must be positive");
    cfg.uplink = up;
  }
  return cfg;
}

tcp::endpoint endpoint(const std::string& bind, std::uint16_t port) {
  return {asio::ip::make_address(bind), port};
}

}  // namespace

RuntimeConfig parse_runtime_config(std::string_view text) {
  try {
    return from_table(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " at line " << e.source().begin.line;
    bad(os.str());
  }
}

RuntimeConfig load_runtime_config(const std::filesystem::path& path) {
  try {
    return from_table(toml::parse_file(path.string()));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path.string() << ": " << e.description() << " at line " << e.source().begin.line;
    bad(os.str());
  }
}

Runtime::Runtime(RuntimeConfig config) : config_(std::move(config)), ticker_(io_) {
  auto sc = scenario::resolve_scenario(config_.scenario);
  if (config_.seed) sc.seed = *config_.seed;
  if (config_.auto_permit) sc.pairing.auto_permit = *config_.auto_permit;
  study_ = std::make_unique<scenario::CaseStudy>(std::move(sc), config_.telemetry, config_.registry, config_.base);
  hub_ = std::make_unique<api::EventHub>(study_->broker(), config_.base);
  router_ = std::make_unique<api::ApiRouter>(study_->gateway(), study_->telemetry());

  const Clock clock = [this] { return study_->now(); };
  mqtt_ = std::make_unique<MqttServer>(io_, study_->broker(), clock, endpoint(config_.mqtt_bind, config_.mqtt_port));
  http_ = std::make_unique<HttpServer>(io_, *router_, *hub_, endpoint(config_.http_bind, config_.http_port),
                                       config_.http);
  if (config_.uplink) {
    uplink_ = std::make_unique<MqttUplink>(io_, study_->broker(), *config_.uplink, study_->now());
    uplink_->start();
  }
  wall_start_ = std::chrono::steady_clock::now();
  sim_start_ = study_->now();
  step();
}

Runtime::~Runtime() {
  uplink_.reset();
  http_.reset();
  mqtt_.reset();
  if (study_) study_->gateway().save_registry();
}

void Runtime::run() { io_.run(); }

void Runtime::stop() {
  asio::post(io_, [this] {
    ticker_.cancel();
    if (uplink_) uplink_->stop();
    http_->stop();
    mqtt_->stop();
  });
}

void Runtime::step() {
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start_).count();
  const double target = sim_start_ + elapsed * config_.time_scale;
  study_->run_until(target);
  const double now = study_->now();
  study_->broker().advance(now);
  if (now - last_sys_ >= config_.sys_interval_s) {
    last_sys_ = now;
    study_->broker().publish_sys(now);
  }
  ticker_.expires_after(std::chrono::microseconds(static_cast<std::int64_t>(config_.step_ms * 1000.0)));
  ticker_.async_wait([this](boost::system::error_code ec) {
    if (!ec) step();
  });
}

}  // namespace zgw::net
