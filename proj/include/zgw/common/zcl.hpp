#pragma once

#include <cstdint>
#include <variant>

namespace zgw {

// Raw attribute payloads as they travel over the air.
using RawValue = std::variant<std::int64_t, bool>;

struct AttributeReport {
  std::uint16_t cluster_id = 0;
  std::uint16_t attribute_id = 0;
  RawValue raw_value = std::int64_t{0};

  friend bool operator==(const AttributeReport&, const AttributeReport&) = default;
};

namespace cluster {
inline constexpr std::uint16_t kAnalogInput = 0x000C;
inline constexpr std::uint16_t kThermostat = 0x0201;
inline constexpr std::uint16_t kTemperature = 0x0402;
inline constexpr std::uint16_t kHumidity = 0x0405;
inline constexpr std::uint16_t kOccupancy = 0x0406;
inline constexpr std::uint16_t kCo2 = 0x040D;
inline constexpr std::uint16_t kIasZone = 0x0500;
}  // namespace cluster

}  // namespace zgw
