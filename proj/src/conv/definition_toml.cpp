#include <algorithm>
#include <sstream>

#include <toml.hpp>

#include "zgw/conv/definition.hpp"

namespace zgw::conv {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConvError(ConvErrc::InvalidDefinition, what); }

ExposeKind parse_kind(const std::string& s) {
  if (s == "numeric") return ExposeKind::Numeric;
  if (s == "binary") return ExposeKind::Binary;
  if (s == "enum") return ExposeKind::Enum;
  bad("unknown expose kind " + s);
}

ValueCodec parse_codec(const std::string& s) {
  if (s == "number") return ValueCodec::Number;
  if (s == "boolean") return ValueCodec::Boolean;
  if (s == "enum_index") return ValueCodec::EnumIndex;
  bad("unknown codec " + s);
}

std::uint16_t u16(const toml::table& t, std::string_view key) {
  auto v = t[key].value<std::int64_t>();
  if (!v || *v < 0 || *v > 0xFFFF) bad("reports entry needs a 16-bit " + std::string(key));
  return static_cast<std::uint16_t>(*v);
}

DeviceDefinition from_table(const toml::table& t) {
  DeviceDefinition def;
  def.model_id = t["model_id"].value_or(std::string{});
  def.vendor = t["vendor"].value_or(std::string{});
  def.description = t["description"].value_or(std::string{});
  if (const auto* exposes = t["exposes"].as_array()) {
    for (const auto& node : *exposes) {
      const auto* et = node.as_table();
      if (!et) bad("exposes entries must be tables");
      Expose e;
      e.name = (*et)["name"].value_or(std::string{});
      e.kind = parse_kind((*et)["kind"].value_or(std::string("numeric")));
      e.unit = (*et)["unit"].value_or(std::string{});
      if (auto v = (*et)["min"].value<double>()) e.min = *v;
      if (auto v = (*et)["max"].value<double>()) e.max = *v;
      e.writable = (*et)["writable"].value_or(false);
      if (const auto* values = (*et)["values"].as_array()) {
        for (const auto& v : *values) e.values.push_back(v.value_or(std::string{}));
      }
      def.exposes.push_back(std::move(e));
    }
  }
  if (const auto* reports = t["reports"].as_array()) {
    for (const auto& node : *reports) {
      const auto* rt = node.as_table();
      if (!rt) bad("reports entries must be tables");
      ReportMapping m;
      m.cluster_id = u16(*rt, "cluster");
      m.attribute_id = u16(*rt, "attribute");
      m.expose = (*rt)["expose"].value_or(std::string{});
      m.scale = (*rt)["scale"].value_or(1.0);
      m.codec = parse_codec((*rt)["codec"].value_or(std::string("number")));
      def.report_map.push_back(std::move(m));
    }
  }
  validate(def);
  return def;
}

std::string describe(const toml::parse_error& e) {
  std::ostringstream os;
  os << e.description() << " at line " << e.source().begin.line;
  return os.str();
}

}  // namespace

DeviceDefinition parse_definition(std::string_view toml_text) {
  try {
    return from_table(toml::parse(toml_text));
  } catch (const toml::parse_error& e) {
    bad(describe(e));
  }
}

DeviceDefinition load_definition(const std::filesystem::path& path) {
  try {
    return from_table(toml::parse_file(path.string()));
  } catch (const toml::parse_error& e) {
    bad(path.string() + ": " + describe(e));
  }
}

std::size_t load_definitions(DefinitionRegistry& registry, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".toml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) registry.register_definition(load_definition(f));
  return files.size();
}

}  // namespace zgw::conv
