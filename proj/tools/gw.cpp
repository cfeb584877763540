// gw: command-line entry points for the gateway.
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "zgw/install_code/credential.hpp"
#include "zgw/net/runtime.hpp"
#include "zgw/scenario/scenario.hpp"
#include "zgw/telemetry/store.hpp"

using namespace zgw;
using nlohmann::json;

namespace {

// One line on stderr that scripts can split on spaces: error code=<Code> detail=<json string>.
int fail(std::string_view code, std::string_view detail) {
  std::cerr << "error code=" << code << " detail=" << json(std::string(detail)).dump() << '\n';
  return 1;
}

int cmd_parse_qr(const std::string& payload, bool as_json) {
  try {
    const auto cred = install_code::parse_qr_payload(payload);
    const auto j = install_code::to_json(cred);
    if (as_json) {
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    for (const auto& key : {"kind", "vendor_format", "payload", "code", "crc", "crc_valid", "link_key"}) {
      const auto& v = j.at(key);
      std::cout << key << '=' << (v.is_string() ? v.get<std::string>() : v.is_null() ? std::string{} : v.dump())
                << '\n';
    }
    return 0;
  } catch (const install_code::CredentialError& e) {
    return fail(e.code_name(), e.what());
  }
}

int cmd_simulate(const std::string& scenario_name, double hours, std::optional<std::uint64_t> seed,
                 std::string out_dir) {
  if (!(hours > 0)) return fail("InvalidArgument", "--hours must be positive");
  try {
    auto cfg = scenario::resolve_scenario(scenario_name);
    if (seed) cfg.seed = *seed;
    if (out_dir.empty()) out_dir = "runs/" + cfg.name + "-seed" + std::to_string(cfg.seed);
    scenario::run_to_directory(std::move(cfg), hours, out_dir);
    std::cout << std::filesystem::absolute(std::filesystem::path(out_dir) / "report.json").string() << '\n';
    return 0;
  } catch (const scenario::ScenarioError& e) {
    return fail(e.code_name(), e.what());
  } catch (const std::exception& e) {
    return fail("IoError", e.what());
  }
}

int cmd_metrics(const std::string& series, const std::string& file, bool csv, bool hourly,
                std::optional<double> from, std::optional<double> to) {
  try {
    if (!std::filesystem::exists(file)) return fail("IoError", "no telemetry file at " + file);
    const telemetry::TelemetryStore store{std::filesystem::path(file)};
    const double t0 = from.value_or(0);
    double t1 = to.value_or(std::numeric_limits<double>::infinity());
    if (hourly) {
      if (!std::isfinite(t1)) {
        const auto last = store.last(series);
        t1 = last ? last->t + 1e-9 : t0;
      }
      const auto buckets = store.hourly_count(series, t0, t1);
      if (csv) {
        std::cout << "hour,count\n";
        for (const auto& b : buckets) std::cout << b.hour << ',' << b.count << '\n';
      } else {
        json out = json::array();
        for (const auto& b : buckets) out.push_back({{"hour", b.hour}, {"count", b.count}});
        std::cout << out.dump() << '\n';
      }
      return 0;
    }
    if (csv) {
      store.export_csv(series, t0, t1, std::cout);
    } else {
      json out = json::array();
      for (const auto& s : store.query(series, t0, t1)) out.push_back({{"t", s.t}, {"value", s.value}});
      std::cout << out.dump() << '\n';
    }
    return 0;
  } catch (const telemetry::TelemetryError& e) {
    return fail(e.code_name(), e.what());
  }
}

int cmd_pair(double duration, const std::string& host, int port) {
  httplib::Client client(host, port);
  const auto res = client.Post("/api/permit_join", json{{"duration_s", duration}}.dump(), "application/json");
  if (!res) return fail("ConnectionFailed", httplib::to_string(res.error()));
  if (res->status == 204) {
    std::cout << "permit_join=" << duration << '\n';
    return 0;
  }
  const auto body = json::parse(res->body, nullptr, false);
  const std::string code = body.is_object() ? body.value("error", std::string("HttpError")) : "HttpError";
  return fail(code, "HTTP " + std::to_string(res->status) + " " + res->body);
}

int cmd_run(const std::string& config_path, std::optional<int> http_port, std::optional<int> mqtt_port) {
  try {
    auto cfg = config_path.empty() ? net::RuntimeConfig{} : net::load_runtime_config(config_path);
    if (http_port) cfg.http_port = static_cast<std::uint16_t>(*http_port);
    if (mqtt_port) cfg.mqtt_port = static_cast<std::uint16_t>(*mqtt_port);
    net::Runtime rt(cfg);
    boost::asio::signal_set signals(rt.io(), SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code& ec, int) {
      if (!ec) rt.stop();
    });
    std::cout << "mqtt=" << cfg.mqtt_bind << ':' << rt.mqtt_port() << " http=" << cfg.http_bind << ':'
              << rt.http_port() << " scenario=" << rt.study().config().name << std::endl;
    rt.run();
    return 0;
  } catch (const scenario::ScenarioError& e) {
    return fail(e.code_name(), e.what());
  } catch (const boost::system::system_error& e) {
    return fail("SocketError", e.what());
  } catch (const std::exception& e) {
    return fail("Error", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zigbee-to-MQTT gateway"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Serve the broker, API and simulated deployment");
  std::string config_path;
  std::optional<int> http_port, mqtt_port;
  run->add_option("--config", config_path, "Gateway TOML configuration");
  run->add_option("--http-port", http_port, "Override [http] port");
  run->add_option("--mqtt-port", mqtt_port, "Override [mqtt] port");

  auto* parse = app.add_subcommand("parse-qr", "Parse a device QR string and derive its link key");
  std::string qr;
  bool qr_json = false;
  parse->add_option("payload", qr, "Scanned QR string")->required();
  parse->add_flag("--json", qr_json, "Print the credential as JSON");

  auto* simulate = app.add_subcommand("simulate", "Run a scenario headless and write a report");
  std::string scenario_name = "office";
  double hours = 96;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  simulate->add_option("--scenario", scenario_name, "Scenario TOML file or built-in name");
  simulate->add_option("--hours", hours, "Simulated hours");
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--out", out_dir, "Output directory (default runs/<name>-seed<S>)");

  auto* metrics = app.add_subcommand("metrics", "Export a telemetry series");
  std::string series, telemetry_file = "telemetry.ndjson";
  bool csv = false, hourly = false;
  std::optional<double> from, to;
  metrics->add_option("--series", series, "Series name, e.g. mqtt.messages or lqi.office1_co2")->required();
  metrics->add_option("--telemetry", telemetry_file, "Telemetry NDJSON file");
  metrics->add_flag("--csv", csv, "CSV instead of JSON");
  metrics->add_flag("--hourly", hourly, "Hourly sample counts");
  metrics->add_option("--from", from, "Start time, seconds (inclusive)");
  metrics->add_option("--to", to, "End time, seconds (exclusive)");

  auto* pair = app.add_subcommand("pair", "Open the pairing window on a running gateway");
  double duration = 0;
  std::string host = "127.0.0.1";
  int port = 8080;
  pair->add_option("--duration", duration, "Seconds, 0..254 (0 closes the window)")->required();
  pair->add_option("--host", host, "Gateway API host");
  pair->add_option("--port", port, "Gateway API port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  }

  if (*run) return cmd_run(config_path, http_port, mqtt_port);
  if (*parse) return cmd_parse_qr(qr, qr_json);
  if (*simulate) return cmd_simulate(scenario_name, hours, seed, out_dir);
  if (*metrics) return cmd_metrics(series, telemetry_file, csv, hourly, from, to);
  if (*pair) return cmd_pair(duration, host, port);
  return 1;
}
