#include "zgw/conv/definition.hpp"

namespace zgw::conv {

namespace {

Expose numeric(std::string name, std::string unit, double min, double max, bool writable = false) {
  return Expose{std::move(name), ExposeKind::Numeric, std::move(unit), min, max, writable, {}};
}

Expose binary(std::string name) { return Expose{std::move(name), ExposeKind::Binary, "", {}, {}, false, {}}; }

ReportMapping map(std::uint16_t cluster, std::uint16_t attribute, std::string expose, double scale,
                  ValueCodec codec = ValueCodec::Number) {
  return ReportMapping{cluster, attribute, std::move(expose), scale, codec};
}

}  // namespace

DefinitionRegistry builtin_catalog() {
  DefinitionRegistry reg;

  reg.register_definition({std::string(model::kThermostat), "Generic", "Radiator thermostat",
                           {numeric("local_temperature", "°C", -10, 50),
                            numeric("occupied_heating_setpoint", "°C", 5, 35, true)},
                           {map(cluster::kThermostat, 0x0000, "local_temperature", 0.01),
                            map(cluster::kThermostat, 0x0012, "occupied_heating_setpoint", 0.01)}});

  // The measurand of the air-quality sensors is an assumption: a VOC index.
  reg.register_definition({std::string(model::kAirQuality), "Generic", "Air quality sensor (VOC index)",
                           {numeric("voc_index", "", 0, 500)},
                           {map(cluster::kAnalogInput, 0x0055, "voc_index", 1)}});

  reg.register_definition({std::string(model::kContact), "Generic", "Door/window contact sensor",
                           {binary("contact")},
                           {map(cluster::kIasZone, 0x0002, "contact", 1, ValueCodec::Boolean)}});

  reg.register_definition({std::string(model::kMotion), "Generic", "Motion sensor",
                           {binary("occupancy")},
                           {map(cluster::kOccupancy, 0x0000, "occupancy", 1, ValueCodec::Boolean)}});

  reg.register_definition({std::string(model::kCo2), "Generic", "CO2 sensor with temperature and humidity",
                           {numeric("co2", "ppm", 0, 10000), numeric("temperature", "°C", -40, 125),
                            numeric("humidity", "%", 0, 100)},
                           {map(cluster::kCo2, 0x0000, "co2", 1), map(cluster::kTemperature, 0x0000, "temperature", 0.01),
                            map(cluster::kHumidity, 0x0000, "humidity", 0.01)}});
  return reg;
}

}  // namespace zgw::conv
