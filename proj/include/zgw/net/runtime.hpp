#pragma once

#include <chrono>
#include <filesystem>
#include <future>
#include <memory>
#include <optional>
#include <string>

#include <boost/asio.hpp>

#include "zgw/api/events.hpp"
#include "zgw/api/router.hpp"
#include "zgw/net/http_server.hpp"
#include "zgw/net/mqtt_server.hpp"
#include "zgw/net/uplink.hpp"
#include "zgw/scenario/scenario.hpp"

namespace zgw::net {

struct RuntimeConfig {
  std::string mqtt_bind = "0.0.0.0";
  std::uint16_t mqtt_port = 1883;
  std::string http_bind = "0.0.0.0";
  std::uint16_t http_port = 8080;
  HttpOptions http;

  std::string base = "gw";
  std::filesystem::path registry;   // empty: in memory
  std::filesystem::path telemetry;  // empty: in memory

  std::string scenario = "office";
  std::optional<std::uint64_t> seed;
  std::optional<bool> auto_permit;
  // Simulated seconds per wall-clock second.
  double time_scale = 1.0;
  double step_ms = 100.0;
  double sys_interval_s = 10.0;

  std::optional<UplinkConfig> uplink;
};

// Reads [mqtt], [http], [gateway], [simulation] and [uplink]. Throws
// scenario::ScenarioError(InvalidScenario) on malformed input.
RuntimeConfig parse_runtime_config(std::string_view toml_text);
RuntimeConfig load_runtime_config(const std::filesystem::path& path);

// Everything `gw run` serves: the simulated deployment, MQTT broker, HTTP/WS
// API and optional uplink, all driven by one io_context thread. Simulated time
// follows the wall clock scaled by time_scale.
class Runtime {
 public:
  explicit Runtime(RuntimeConfig config);
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  // Blocks until stop() is called or the io_context runs out of work.
  void run();
  // Thread-safe.
  void stop();

  std::uint16_t mqtt_port() const { return mqtt_->port(); }
  std::uint16_t http_port() const { return http_->port(); }
  asio::io_context& io() noexcept { return io_; }
  scenario::CaseStudy& study() noexcept { return *study_; }
  const MqttUplink* uplink() const noexcept { return uplink_.get(); }
  const RuntimeConfig& config() const noexcept { return config_; }

  // Runs fn on the loop thread and waits for its result; for tests and tools
  // that live on other threads.
  template <class F>
  auto call(F fn) -> decltype(fn()) {
    std::packaged_task<decltype(fn())()> task(std::move(fn));
    auto result = task.get_future();
    asio::post(io_, [&task] { task(); });
    return result.get();
  }

 private:
  void step();

  RuntimeConfig config_;
  std::unique_ptr<scenario::CaseStudy> study_;
  std::unique_ptr<api::EventHub> hub_;
  std::unique_ptr<api::ApiRouter> router_;
  // Declared after everything sessions refer to, so pending handlers die first.
  asio::io_context io_;
  asio::steady_timer ticker_;
  std::unique_ptr<MqttServer> mqtt_;
  std::unique_ptr<HttpServer> http_;
  std::unique_ptr<MqttUplink> uplink_;
  std::chrono::steady_clock::time_point wall_start_;
  double sim_start_ = 0;
  double last_sys_ = -1e300;
};

}  // namespace zgw::net
