#include "zgw/sim/topology.hpp"

#include <sstream>

namespace zgw::sim {

namespace {

[[noreturn]] void bad(std::string_view what) {
  throw SimError(SimErrc::InvalidTopology, what);
}

double number_or(const toml::table& t, std::string_view key, double fallback) {
  if (auto v = t[key].value<double>()) return *v;
  return fallback;
}

}  // namespace

Position position_from_toml(const toml::node* node, std::string_view what) {
  const auto* arr = node ? node->as_array() : nullptr;
  if (!arr || arr->size() != 2) bad(std::string(what) + ": expected [x, y]");
  auto x = (*arr)[0].value<double>();
  auto y = (*arr)[1].value<double>();
  if (!x || !y) bad(std::string(what) + ": coordinates must be numbers");
  return {*x, *y};
}

NodeConfig node_from_toml(const toml::table& t) {
  NodeConfig cfg;
  auto ieee_text = t["ieee"].value<std::string>();
  if (!ieee_text) bad("node without ieee");
  auto ieee = IeeeAddr::parse(*ieee_text);
  if (!ieee) bad("bad ieee address " + *ieee_text);
  cfg.ieee = *ieee;
  auto role = parse_role(t["role"].value_or(std::string("end_device")));
  if (!role) bad("bad role for " + *ieee_text);
  cfg.role = *role;
  cfg.position = position_from_toml(t.get("position"), "position of " + *ieee_text);
  cfg.sleepy = t["sleepy"].value_or(false);
  cfg.poll_interval_s = number_or(t, "poll_interval_s", 0.0);
  cfg.model_id = t["model_id"].value_or(std::string{});
  return cfg;
}

NetworkConfig topology_from_toml(const toml::table& table) {
  NetworkConfig cfg;
  if (auto seed = table["seed"].value<std::int64_t>()) cfg.seed = static_cast<std::uint64_t>(*seed);
  if (const auto* radio = table["radio"].as_table()) {
    cfg.radio.range_m = number_or(*radio, "range_m", cfg.radio.range_m);
    cfg.radio.max_lqi = number_or(*radio, "max_lqi", cfg.radio.max_lqi);
    cfg.radio.wall_penalty = number_or(*radio, "wall_penalty", cfg.radio.wall_penalty);
    cfg.radio.noise_amplitude = number_or(*radio, "noise_amplitude", cfg.radio.noise_amplitude);
  }
  if (const auto* pending = table["pending"].as_table()) {
    if (auto cap = (*pending)["capacity"].value<std::int64_t>()) {
      if (*cap <= 0) bad("pending.capacity must be positive");
      cfg.pending.capacity = static_cast<std::size_t>(*cap);
    }
    cfg.pending.expiry_s = number_or(*pending, "expiry_s", cfg.pending.expiry_s);
  }
  if (const auto* walls = table["walls"].as_array()) {
    for (const auto& w : *walls) {
      const auto* wt = w.as_table();
      if (!wt) bad("walls entries must be tables");
      cfg.walls.push_back({position_from_toml(wt->get("from"), "wall.from"),
                           position_from_toml(wt->get("to"), "wall.to")});
    }
  }
  if (const auto* nodes = table["nodes"].as_array()) {
    for (const auto& n : *nodes) {
      const auto* nt = n.as_table();
      if (!nt) bad("nodes entries must be tables");
      cfg.nodes.push_back(node_from_toml(*nt));
    }
  }
  return cfg;
}

NetworkConfig parse_topology(std::string_view text) {
  try {
    return topology_from_toml(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " at line " << e.source().begin.line;
    bad(os.str());
  }
}

NetworkConfig load_topology(const std::filesystem::path& path) {
  try {
    return topology_from_toml(toml::parse_file(path.string()));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path.string() << ": " << e.description() << " at line " << e.source().begin.line;
    bad(os.str());
  }
}

}  // namespace zgw::sim
