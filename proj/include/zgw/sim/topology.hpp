#pragma once

#include <filesystem>
#include <string_view>

#include <toml.hpp>

#include "zgw/sim/network.hpp"

namespace zgw::sim {

// Reads `seed`, `[radio]`, `[pending]`, `[[walls]]` and `[[nodes]]` from a
// topology table. Missing sections keep their defaults. Throws
// SimError(InvalidTopology) on malformed entries.
NetworkConfig topology_from_toml(const toml::table& table);
NetworkConfig load_topology(const std::filesystem::path& path);
NetworkConfig parse_topology(std::string_view text);

Position position_from_toml(const toml::node* node, std::string_view what);
NodeConfig node_from_toml(const toml::table& table);

}  // namespace zgw::sim
