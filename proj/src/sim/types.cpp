#include "zgw/sim/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "zgw/sim/radio.hpp"

namespace zgw::sim {

std::string_view to_string(SimErrc code) noexcept {
  switch (code) {
    case SimErrc::InvalidTopology: return "InvalidTopology";
    case SimErrc::DuplicateNode: return "DuplicateNode";
    case SimErrc::UnknownNode: return "UnknownNode";
    case SimErrc::DurationOutOfRange: return "DurationOutOfRange";
    case SimErrc::Unreachable: return "Unreachable";
    case SimErrc::NotJoined: return "NotJoined";
    case SimErrc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string IeeeAddr::str() const {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::optional<IeeeAddr> IeeeAddr::parse(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.empty() || text.size() > 16) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return IeeeAddr{v};
}

std::string ShortAddr::str() const {
  char buf[7];
  std::snprintf(buf, sizeof buf, "0x%04x", static_cast<unsigned>(value));
  return buf;
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Coordinator: return "coordinator";
    case Role::Router: return "router";
    case Role::EndDevice: return "end_device";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "coordinator") return Role::Coordinator;
  if (text == "router") return Role::Router;
  if (text == "end_device") return Role::EndDevice;
  return std::nullopt;
}

double distance(Position a, Position b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

double cross(Position o, Position a, Position b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool properly_intersect(Position p1, Position p2, Position q1, Position q2) noexcept {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

int count_wall_crossings(Position a, Position b, const std::vector<Wall>& walls) noexcept {
  int n = 0;
  for (const auto& w : walls) {
    if (properly_intersect(a, b, w.from, w.to)) ++n;
  }
  return n;
}

int compute_lqi(const RadioModel& model, double distance_m, int walls, double epsilon) noexcept {
  if (distance_m >= model.range_m) return 0;
  const double raw = model.max_lqi * (1.0 - distance_m / model.range_m) -
                     model.wall_penalty * walls + epsilon;
  const long rounded = std::lround(raw);
  const long hi = std::lround(model.max_lqi);
  return static_cast<int>(std::clamp(rounded, 0L, hi));
}

}  // namespace zgw::sim
