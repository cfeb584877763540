#include "zgw/conv/definition.hpp"

#include <cmath>
#include <mutex>
#include <set>

namespace zgw::conv {

std::string_view to_string(ConvErrc code) noexcept {
  switch (code) {
    case ConvErrc::NotSupported: return "NotSupported";
    case ConvErrc::UnmappedAttribute: return "UnmappedAttribute";
    case ConvErrc::RangeViolation: return "RangeViolation";
    case ConvErrc::NotWritable: return "NotWritable";
    case ConvErrc::UnknownExpose: return "UnknownExpose";
    case ConvErrc::TypeMismatch: return "TypeMismatch";
    case ConvErrc::InvalidDefinition: return "InvalidDefinition";
  }
  return "Unknown";
}

const Expose* DeviceDefinition::find_expose(std::string_view name) const noexcept {
  for (const auto& e : exposes) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const ReportMapping* DeviceDefinition::find_mapping(std::uint16_t cluster, std::uint16_t attribute) const noexcept {
  for (const auto& m : report_map) {
    if (m.cluster_id == cluster && m.attribute_id == attribute) return &m;
  }
  return nullptr;
}

const ReportMapping* DeviceDefinition::mapping_for(std::string_view expose) const noexcept {
  for (const auto& m : report_map) {
    if (m.expose == expose) return &m;
  }
  return nullptr;
}

void validate(const DeviceDefinition& def) {
  if (def.model_id.empty()) throw ConvError(ConvErrc::InvalidDefinition, "empty model_id");
  std::set<std::string_view> names;
  for (const auto& e : def.exposes) {
    if (e.name.empty()) throw ConvError(ConvErrc::InvalidDefinition, def.model_id + ": unnamed expose");
    if (!names.insert(e.name).second) {
      throw ConvError(ConvErrc::InvalidDefinition, def.model_id + ": duplicate expose " + e.name);
    }
    if (e.min && e.max && *e.min > *e.max) {
      throw ConvError(ConvErrc::InvalidDefinition, def.model_id + ": min > max for " + e.name);
    }
  }
  std::set<std::pair<std::uint16_t, std::uint16_t>> keys;
  for (const auto& m : def.report_map) {
    if (!names.contains(m.expose)) {
      throw ConvError(ConvErrc::InvalidDefinition, def.model_id + ": mapping targets unknown expose " + m.expose);
    }
    if (!(m.scale > 0.0)) throw ConvError(ConvErrc::InvalidDefinition, def.model_id + ": scale must be positive");
    if (!keys.insert({m.cluster_id, m.attribute_id}).second) {
      throw ConvError(ConvErrc::InvalidDefinition, def.model_id + ": duplicate cluster/attribute mapping");
    }
  }
}

namespace {

std::string_view kind_name(ExposeKind k) {
  switch (k) {
    case ExposeKind::Numeric: return "numeric";
    case ExposeKind::Binary: return "binary";
    case ExposeKind::Enum: return "enum";
  }
  return "numeric";
}

std::string_view codec_name(ValueCodec c) {
  switch (c) {
    case ValueCodec::Number: return "number";
    case ValueCodec::Boolean: return "boolean";
    case ValueCodec::EnumIndex: return "enum_index";
  }
  return "number";
}

// Scales like 0.01 are applied as a division by 100 so that centi-unit
// readings print exactly (2150 -> 21.5).
double apply_scale(double raw, double scale) {
  const double inv = 1.0 / scale;
  if (scale < 1.0 && std::abs(inv - std::round(inv)) < 1e-9) return raw / std::round(inv);
  return raw * scale;
}

double remove_scale(double value, double scale) {
  const double inv = 1.0 / scale;
  if (scale < 1.0 && std::abs(inv - std::round(inv)) < 1e-9) return value * std::round(inv);
  return value / scale;
}

double raw_as_number(const RawValue& raw) {
  return std::visit([](auto v) { return static_cast<double>(v); }, raw);
}

void check_range(const Expose& e, double v) {
  if ((e.min && v < *e.min) || (e.max && v > *e.max)) {
    throw ConvError(ConvErrc::RangeViolation, e.name + " = " + std::to_string(v));
  }
}

}  // namespace

nlohmann::json to_json(const DeviceDefinition& def) {
  nlohmann::json j;
  j["model_id"] = def.model_id;
  j["vendor"] = def.vendor;
  j["description"] = def.description;
  auto exposes = nlohmann::json::array();
  for (const auto& e : def.exposes) {
    nlohmann::json ej{{"name", e.name}, {"kind", kind_name(e.kind)}, {"unit", e.unit}, {"writable", e.writable}};
    if (e.min) ej["min"] = *e.min;
    if (e.max) ej["max"] = *e.max;
    if (!e.values.empty()) ej["values"] = e.values;
    exposes.push_back(std::move(ej));
  }
  j["exposes"] = std::move(exposes);
  auto reports = nlohmann::json::array();
  for (const auto& m : def.report_map) {
    reports.push_back({{"cluster", m.cluster_id},
                       {"attribute", m.attribute_id},
                       {"expose", m.expose},
                       {"scale", m.scale},
                       {"codec", codec_name(m.codec)}});
  }
  j["reports"] = std::move(reports);
  return j;
}

nlohmann::json to_json(const ExposeValue& value) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, value);
}

ExposeValue expose_value_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ConvError(ConvErrc::TypeMismatch, "unsupported JSON value " + j.dump());
}

nlohmann::json to_json(const NormalizedPayload& payload) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : payload.values) j[name] = to_json(value);
  j["linkquality"] = payload.linkquality;
  return j;
}

NormalizedPayload convert_report(const DeviceDefinition& def, const AttributeReport& report, int lqi) {
  const ReportMapping* m = def.find_mapping(report.cluster_id, report.attribute_id);
  if (!m) {
    throw ConvError(ConvErrc::UnmappedAttribute,
                    def.model_id + " cluster " + std::to_string(report.cluster_id) + " attribute " +
                        std::to_string(report.attribute_id));
  }
  const Expose& e = *def.find_expose(m->expose);
  NormalizedPayload out;
  out.linkquality = lqi;
  switch (m->codec) {
    case ValueCodec::Number: {
      if (std::holds_alternative<bool>(report.raw_value)) {
        throw ConvError(ConvErrc::TypeMismatch, e.name + " expects a numeric raw value");
      }
      const double v = apply_scale(raw_as_number(report.raw_value), m->scale);
      check_range(e, v);
      out.values[e.name] = v;
      break;
    }
    case ValueCodec::Boolean:
      out.values[e.name] = raw_as_number(report.raw_value) != 0.0;
      break;
    case ValueCodec::EnumIndex: {
      const double idx = raw_as_number(report.raw_value);
      if (idx < 0 || idx >= static_cast<double>(e.values.size())) {
        throw ConvError(ConvErrc::RangeViolation, e.name + " index " + std::to_string(idx));
      }
      out.values[e.name] = e.values[static_cast<std::size_t>(idx)];
      break;
    }
  }
  return out;
}

AttributeReport convert_command(const DeviceDefinition& def, std::string_view name, const ExposeValue& desired) {
  const Expose* e = def.find_expose(name);
  if (!e) throw ConvError(ConvErrc::UnknownExpose, def.model_id + "." + std::string(name));
  if (!e->writable) throw ConvError(ConvErrc::NotWritable, def.model_id + "." + e->name);
  const ReportMapping* m = def.mapping_for(e->name);
  if (!m) throw ConvError(ConvErrc::NotWritable, def.model_id + "." + e->name + " has no attribute");

  AttributeReport out;
  out.cluster_id = m->cluster_id;
  out.attribute_id = m->attribute_id;
  switch (m->codec) {
    case ValueCodec::Number: {
      const double* v = std::get_if<double>(&desired);
      if (!v) throw ConvError(ConvErrc::TypeMismatch, e->name + " expects a number");
      if (!std::isfinite(*v)) throw ConvError(ConvErrc::RangeViolation, e->name);
      check_range(*e, *v);
      out.raw_value = static_cast<std::int64_t>(std::llround(remove_scale(*v, m->scale)));
      break;
    }
    case ValueCodec::Boolean: {
      const bool* b = std::get_if<bool>(&desired);
      if (!b) throw ConvError(ConvErrc::TypeMismatch, e->name + " expects a boolean");
      out.raw_value = *b;
      break;
    }
    case ValueCodec::EnumIndex: {
      const std::string* s = std::get_if<std::string>(&desired);
      if (!s) throw ConvError(ConvErrc::TypeMismatch, e->name + " expects a label");
      auto it = std::find(e->values.begin(), e->values.end(), *s);
      if (it == e->values.end()) throw ConvError(ConvErrc::RangeViolation, e->name + " = " + *s);
      out.raw_value = static_cast<std::int64_t>(it - e->values.begin());
      break;
    }
  }
  return out;
}

DefinitionRegistry::DefinitionRegistry(const DefinitionRegistry& other) {
  std::shared_lock lock(other.mutex_);
  defs_ = other.defs_;
}

DefinitionRegistry& DefinitionRegistry::operator=(const DefinitionRegistry& other) {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    defs_ = other.defs_;
  }
  return *this;
}

RegisterOutcome DefinitionRegistry::register_definition(DeviceDefinition def) {
  validate(def);
  auto ptr = std::make_shared<const DeviceDefinition>(std::move(def));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = defs_.insert_or_assign(ptr->model_id, ptr);
  return inserted ? RegisterOutcome::Added : RegisterOutcome::Replaced;
}

std::shared_ptr<const DeviceDefinition> DefinitionRegistry::find(std::string_view model_id) const noexcept {
  std::shared_lock lock(mutex_);
  auto it = defs_.find(model_id);
  return it == defs_.end() ? nullptr : it->second;
}

std::shared_ptr<const DeviceDefinition> DefinitionRegistry::lookup(std::string_view model_id) const {
  auto def = find(model_id);
  if (!def) throw ConvError(ConvErrc::NotSupported, model_id);
  return def;
}

std::vector<std::shared_ptr<const DeviceDefinition>> DefinitionRegistry::all() const {
  std::shared_lock lock(mutex_);
  std::vector<std::shared_ptr<const DeviceDefinition>> out;
  for (const auto& [id, def] : defs_) out.push_back(def);
  return out;
}

std::size_t DefinitionRegistry::size() const {
  std::shared_lock lock(mutex_);
  return defs_.size();
}

}  // namespace zgw::conv
