#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "zgw/conv/definition.hpp"
#include "zgw/gateway/registry.hpp"
#include "zgw/mqtt/host.hpp"
#include "zgw/sim/network.hpp"
#include "zgw/telemetry/store.hpp"

namespace zgw::gateway {

struct GatewayOptions {
  std::string base = "gw";
  // Registry file; empty keeps the registry in memory only.
  std::filesystem::path registry_path;
};

struct CommandResult {
  std::string status;  // ok | queued | error
  std::uint64_t transaction = 0;
  std::string reason;  // error code name when status is error
  std::optional<GatewayErrc> gateway_error;
  std::optional<conv::ConvErrc> converter_error;
};

nlohmann::json to_json(const CommandResult& result);

struct GatewayCounters {
  std::uint64_t joins = 0;
  std::uint64_t reports_delivered = 0;
  std::uint64_t state_publishes = 0;
  std::uint64_t unsupported_reports = 0;
  std::uint64_t converter_errors = 0;
  std::uint64_t commands = 0;
  std::uint64_t bridge_events = 0;
};

// Binds simulator events to converters and MQTT topics. Every input (network
// event, MQTT command, operator call) goes through one ordered work queue,
// and handlers never run nested inside one another.
class Gateway {
 public:
  Gateway(GatewayOptions options, sim::Network& network, mqtt::BrokerHost& broker,
          telemetry::TelemetryStore& telemetry, conv::DefinitionRegistry definitions);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Operator surface. Errors are thrown as GatewayError.
  void permit_join(double duration_s);
  void rename(std::string from, std::string to);
  void remove(const std::string& friendly_name);
  // Same path as a publish on <base>/<name>/set; the result record is also
  // published on <base>/<name>/set/result.
  CommandResult command(const std::string& friendly_name, const nlohmann::json& payload);

  std::vector<DeviceRecord> devices() const { return registry_.records(); }
  const DeviceRegistry& registry() const noexcept { return registry_; }
  // Merged state last published for the device (the retained payload).
  std::optional<nlohmann::json> state(const std::string& friendly_name) const;
  nlohmann::json bridge_state() const;
  nlohmann::json device_view(const DeviceRecord& record) const;

  const GatewayCounters& counters() const noexcept { return counters_; }
  const std::string& base() const noexcept { return options_.base; }
  const conv::DefinitionRegistry& definitions() const noexcept { return definitions_; }
  double now() const noexcept { return network_.now(); }
  void save_registry();

  std::string state_topic(std::string_view name) const { return options_.base + "/" + std::string(name); }

 private:
  struct SimWork {
    sim::SimEvent event;
    std::optional<sim::IeeeAddr> source;  // frame source, resolved when the event fired
  };
  struct CommandWork {
    std::string name;
    std::string payload;
  };
  struct HourWork {
    std::int64_t hour;
  };
  using Work = std::variant<SimWork, CommandWork, HourWork, std::function<void()>>;

  void post(Work work);
  void drain();
  void run_inline(const std::function<void()>& fn);

  void on_sim(const SimWork& w);
  void on_joined(const sim::SimEvent& e);
  void on_report(const sim::Frame& frame, sim::IeeeAddr source);
  void on_command_message(const CommandWork& w);
  void on_hour(std::int64_t hour);

  CommandResult execute_command(const std::string& name, const nlohmann::json& payload);
  void publish(const std::string& topic, const std::string& payload, bool retain);
  void publish_json(const std::string& topic, const nlohmann::json& body, bool retain);
  void bridge_event(nlohmann::json body);
  void bridge_log(nlohmann::json body);
  void publish_bridge_state();
  void persist();

  GatewayOptions options_;
  sim::Network& network_;
  mqtt::BrokerHost& broker_;
  telemetry::TelemetryStore& telemetry_;
  conv::DefinitionRegistry definitions_;
  DeviceRegistry registry_;
  std::map<sim::IeeeAddr, nlohmann::json> state_;
  std::unique_ptr<mqtt::LocalClient> client_;
  std::deque<Work> queue_;
  bool draining_ = false;
  std::uint64_t next_transaction_ = 1;
  GatewayCounters counters_;
  std::shared_ptr<bool> alive_;
};

}  // namespace zgw::gateway
