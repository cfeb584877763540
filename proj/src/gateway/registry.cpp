#include "zgw/gateway/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace zgw::gateway {

std::string_view to_string(GatewayErrc code) noexcept {
  switch (code) {
    case GatewayErrc::UnknownDevice: return "UnknownDevice";
    case GatewayErrc::NameTaken: return "NameTaken";
    case GatewayErrc::InvalidName: return "InvalidName";
    case GatewayErrc::DurationOutOfRange: return "DurationOutOfRange";
    case GatewayErrc::CorruptRegistry: return "CorruptRegistry";
    case GatewayErrc::InvalidPayload: return "InvalidPayload";
    case GatewayErrc::IoError: return "IoError";
  }
  return "Unknown";
}

nlohmann::json to_json(const DeviceRecord& r) {
  return {{"ieee_addr", r.ieee.str()}, {"friendly_name", r.friendly_name}, {"model_id", r.model_id},
          {"joined_at", r.joined_at},  {"last_seen", r.last_seen},         {"last_lqi", r.last_lqi}};
}

DeviceRecord record_from_json(const nlohmann::json& j) {
  DeviceRecord r;
  const auto ieee = sim::IeeeAddr::parse(j.at("ieee_addr").get<std::string>());
  if (!ieee) throw GatewayError(GatewayErrc::CorruptRegistry, "bad ieee_addr " + j.at("ieee_addr").dump());
  r.ieee = *ieee;
  r.friendly_name = j.at("friendly_name").get<std::string>();
  r.model_id = j.value("model_id", "");
  r.joined_at = j.value("joined_at", 0.0);
  r.last_seen = j.value("last_seen", 0.0);
  r.last_lqi = j.value("last_lqi", 0);
  return r;
}

bool is_valid_friendly_name(std::string_view name) noexcept {
  if (name.empty() || name == "bridge" || name.front() == '$') return false;
  return name.find_first_of("/+#") == std::string_view::npos && name.find('\0') == std::string_view::npos;
}

void DeviceRegistry::insert(DeviceRecord record) {
  if (find(std::string_view(record.friendly_name))) {
    throw GatewayError(GatewayErrc::NameTaken, record.friendly_name);
  }
  const auto ieee = record.ieee;
  records_.insert_or_assign(ieee, std::move(record));
}

DeviceRecord& DeviceRegistry::ensure(sim::IeeeAddr ieee, std::string_view model_id, double joined_at) {
  if (auto it = records_.find(ieee); it != records_.end()) {
    it->second.joined_at = joined_at;
    if (!model_id.empty()) it->second.model_id = std::string(model_id);
    return it->second;
  }
  DeviceRecord r;
  r.ieee = ieee;
  r.friendly_name = ieee.str();
  r.model_id = std::string(model_id);
  r.joined_at = joined_at;
  r.last_seen = joined_at;
  insert(std::move(r));
  return records_.at(ieee);
}

DeviceRecord* DeviceRegistry::find(sim::IeeeAddr ieee) noexcept {
  auto it = records_.find(ieee);
  return it == records_.end() ? nullptr : &it->second;
}

const DeviceRecord* DeviceRegistry::find(sim::IeeeAddr ieee) const noexcept {
  auto it = records_.find(ieee);
  return it == records_.end() ? nullptr : &it->second;
}

DeviceRecord* DeviceRegistry::find(std::string_view name) noexcept {
  for (auto& [ieee, r] : records_) {
    if (r.friendly_name == name) return &r;
  }
  return nullptr;
}

const DeviceRecord* DeviceRegistry::find(std::string_view name) const noexcept {
  return const_cast<DeviceRegistry*>(this)->find(name);
}

const DeviceRecord& DeviceRegistry::at(std::string_view name) const {
  const auto* r = find(name);
  if (!r) throw GatewayError(GatewayErrc::UnknownDevice, name);
  return *r;
}

void DeviceRegistry::rename(std::string_view from, std::string_view to) {
  DeviceRecord* r = find(from);
  if (!r) throw GatewayError(GatewayErrc::UnknownDevice, from);
  if (!is_valid_friendly_name(to)) throw GatewayError(GatewayErrc::InvalidName, to);
  if (from == to) return;
  if (find(to)) throw GatewayError(GatewayErrc::NameTaken, to);
  r->friendly_name = std::string(to);
}

DeviceRecord DeviceRegistry::remove(std::string_view name) {
  const DeviceRecord* r = find(name);
  if (!r) throw GatewayError(GatewayErrc::UnknownDevice, name);
  DeviceRecord copy = *r;
  records_.erase(copy.ieee);
  return copy;
}

std::vector<DeviceRecord> DeviceRegistry::records() const {
  std::vector<DeviceRecord> out;
  out.reserve(records_.size());
  for (const auto& [ieee, r] : records_) out.push_back(r);
  std::stable_sort(out.begin(), out.end(),
                   [](const DeviceRecord& a, const DeviceRecord& b) { return a.joined_at < b.joined_at; });
  return out;
}

void DeviceRegistry::save(const std::filesystem::path& path) const {
  nlohmann::json doc{{"version", 1}, {"devices", nlohmann::json::array()}};
  for (const auto& [ieee, r] : records_) doc["devices"].push_back(to_json(r));
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(2) << '\n';
    out.flush();
    if (!out) throw GatewayError(GatewayErrc::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw GatewayError(GatewayErrc::IoError, "rename " + tmp.string() + ": " + ec.message());
}

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

DeviceRegistry DeviceRegistry::load(const std::filesystem::path& path) {
  DeviceRegistry reg;
  std::ifstream in(path);
  if (!in) return reg;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GatewayError(GatewayErrc::CorruptRegistry, path.string() + ": line " + std::to_string(line_of(text, e.byte)) +
                                                         ", offset " + std::to_string(e.byte));
  }
  try {
    for (const auto& d : doc.at("devices")) reg.insert(record_from_json(d));
  } catch (const nlohmann::json::exception& e) {
    throw GatewayError(GatewayErrc::CorruptRegistry, path.string() + ": " + e.what());
  } catch (const GatewayError& e) {
    if (e.code() == GatewayErrc::CorruptRegistry) throw;
    throw GatewayError(GatewayErrc::CorruptRegistry, path.string() + ": " + e.what());
  }
  return reg;
}

}  // namespace zgw::gateway
