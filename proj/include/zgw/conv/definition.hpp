#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zgw/common/error.hpp"
#include "zgw/common/zcl.hpp"

namespace zgw::conv {

enum class ConvErrc {
  NotSupported,
  UnmappedAttribute,
  RangeViolation,
  NotWritable,
  UnknownExpose,
  TypeMismatch,
  InvalidDefinition,
};

std::string_view to_string(ConvErrc code) noexcept;

using ConvError = Error<ConvErrc>;

enum class ExposeKind { Numeric, Binary, Enum };
enum class ValueCodec { Number, Boolean, EnumIndex };

struct Expose {
  std::string name;
  ExposeKind kind = ExposeKind::Numeric;
  std::string unit;
  std::optional<double> min;
  std::optional<double> max;
  bool writable = false;
  std::vector<std::string> values;  // enum labels, indexed by raw value

  friend bool operator==(const Expose&, const Expose&) = default;
};

struct ReportMapping {
  std::uint16_t cluster_id = 0;
  std::uint16_t attribute_id = 0;
  std::string expose;
  double scale = 1.0;
  ValueCodec codec = ValueCodec::Number;

  friend bool operator==(const ReportMapping&, const ReportMapping&) = default;
};

struct DeviceDefinition {
  std::string model_id;
  std::string vendor;
  std::string description;
  std::vector<Expose> exposes;
  std::vector<ReportMapping> report_map;

  const Expose* find_expose(std::string_view name) const noexcept;
  const ReportMapping* find_mapping(std::uint16_t cluster, std::uint16_t attribute) const noexcept;
  const ReportMapping* mapping_for(std::string_view expose) const noexcept;

  friend bool operator==(const DeviceDefinition&, const DeviceDefinition&) = default;
};

// Expose names unique, every mapping target exists, model_id non-empty.
void validate(const DeviceDefinition& def);

nlohmann::json to_json(const DeviceDefinition& def);

using ExposeValue = std::variant<double, bool, std::string>;

nlohmann::json to_json(const ExposeValue& value);
// Numbers, booleans and strings; anything else is a TypeMismatch.
ExposeValue expose_value_from_json(const nlohmann::json& j);

struct NormalizedPayload {
  std::map<std::string, ExposeValue> values;
  int linkquality = 0;
};

// Flat object of the values plus `linkquality`.
nlohmann::json to_json(const NormalizedPayload& payload);

NormalizedPayload convert_report(const DeviceDefinition& def, const AttributeReport& report, int lqi);

// Write form of a desired value: raw = round(value / scale).
AttributeReport convert_command(const DeviceDefinition& def, std::string_view name, const ExposeValue& desired);

enum class RegisterOutcome { Added, Replaced };

// Definitions are shared immutable snapshots: lookups may run concurrently,
// registrations take the writer lock.
class DefinitionRegistry {
 public:
  DefinitionRegistry() = default;
  DefinitionRegistry(const DefinitionRegistry& other);
  DefinitionRegistry& operator=(const DefinitionRegistry& other);

  RegisterOutcome register_definition(DeviceDefinition def);
  std::shared_ptr<const DeviceDefinition> lookup(std::string_view model_id) const;
  std::shared_ptr<const DeviceDefinition> find(std::string_view model_id) const noexcept;
  std::vector<std::shared_ptr<const DeviceDefinition>> all() const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const DeviceDefinition>, std::less<>> defs_;
};

// The five device classes of the office deployment.
DefinitionRegistry builtin_catalog();

namespace model {
inline constexpr std::string_view kThermostat = "ZGW-THERMOSTAT";
inline constexpr std::string_view kAirQuality = "ZGW-AIRQUALITY";
inline constexpr std::string_view kContact = "ZGW-CONTACT";
inline constexpr std::string_view kMotion = "ZGW-MOTION";
inline constexpr std::string_view kCo2 = "ZGW-CO2";
}  // namespace model

DeviceDefinition parse_definition(std::string_view toml_text);
DeviceDefinition load_definition(const std::filesystem::path& path);
// Loads every *.toml in a directory, in filename order.
std::size_t load_definitions(DefinitionRegistry& registry, const std::filesystem::path& dir);

}  // namespace zgw::conv
