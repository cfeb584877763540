#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zgw/common/error.hpp"
#include "zgw/sim/types.hpp"

namespace zgw::gateway {

enum class GatewayErrc {
  UnknownDevice,
  NameTaken,
  InvalidName,
  DurationOutOfRange,
  CorruptRegistry,
  InvalidPayload,
  IoError,
};

std::string_view to_string(GatewayErrc code) noexcept;
using GatewayError = Error<GatewayErrc>;

struct DeviceRecord {
  sim::IeeeAddr ieee;
  std::string friendly_name;
  std::string model_id;
  double joined_at = 0;
  double last_seen = 0;
  int last_lqi = 0;
  friend bool operator==(const DeviceRecord&, const DeviceRecord&) = default;
};

nlohmann::json to_json(const DeviceRecord& record);
DeviceRecord record_from_json(const nlohmann::json& j);

// Friendly names become topic levels: no `/`, `+`, `#`, no leading `$`, and
// `bridge` is reserved for the gateway's own topics.
bool is_valid_friendly_name(std::string_view name) noexcept;

class DeviceRegistry {
 public:
  // Adds a record named after the IEEE address unless one already exists for
  // that device; returns the stored record.
  DeviceRecord& ensure(sim::IeeeAddr ieee, std::string_view model_id, double joined_at);

  DeviceRecord* find(sim::IeeeAddr ieee) noexcept;
  const DeviceRecord* find(sim::IeeeAddr ieee) const noexcept;
  DeviceRecord* find(std::string_view friendly_name) noexcept;
  const DeviceRecord* find(std::string_view friendly_name) const noexcept;
  // Throws UnknownDevice.
  const DeviceRecord& at(std::string_view friendly_name) const;

  // Throws UnknownDevice, InvalidName or NameTaken.
  void rename(std::string_view from, std::string_view to);
  // Throws UnknownDevice.
  DeviceRecord remove(std::string_view friendly_name);

  // Ordered by join time, then address.
  std::vector<DeviceRecord> records() const;
  std::size_t size() const noexcept { return records_.size(); }

  // Atomic: writes a sibling temp file and renames it over `path`.
  void save(const std::filesystem::path& path) const;
  // A missing file is an empty registry. Parse failures throw CorruptRegistry
  // naming the line and byte offset.
  static DeviceRegistry load(const std::filesystem::path& path);

  friend bool operator==(const DeviceRegistry&, const DeviceRegistry&) = default;

 private:
  void insert(DeviceRecord record);

  std::map<sim::IeeeAddr, DeviceRecord> records_;
};

}  // namespace zgw::gateway
