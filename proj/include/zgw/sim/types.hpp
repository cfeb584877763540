#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zgw/common/error.hpp"
#include "zgw/common/zcl.hpp"

namespace zgw::sim {

enum class SimErrc {
  InvalidTopology,
  DuplicateNode,
  UnknownNode,
  DurationOutOfRange,
  Unreachable,
  NotJoined,
  InvalidArgument,
};

std::string_view to_string(SimErrc code) noexcept;

using SimError = Error<SimErrc>;

struct IeeeAddr {
  std::uint64_t value = 0;

  // "0x" followed by 16 lowercase hex digits, the usual friendly-name default.
  std::string str() const;
  static std::optional<IeeeAddr> parse(std::string_view text);

  friend auto operator<=>(const IeeeAddr&, const IeeeAddr&) = default;
};

struct ShortAddr {
  std::uint16_t value = 0;

  std::string str() const;

  friend auto operator<=>(const ShortAddr&, const ShortAddr&) = default;
};

inline constexpr ShortAddr kCoordinatorAddr{0x0000};

enum class Role { Coordinator, Router, EndDevice };

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view text);

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(Position a, Position b) noexcept;

// A wall segment; every crossing of a link's line of sight costs attenuation.
struct Wall {
  Position from;
  Position to;
};

// Number of walls properly crossed by the segment a-b.
int count_wall_crossings(Position a, Position b, const std::vector<Wall>& walls) noexcept;

struct NodeConfig {
  IeeeAddr ieee;
  Role role = Role::EndDevice;
  Position position;
  bool sleepy = false;
  double poll_interval_s = 0.0;
  std::string model_id;
};

struct Node {
  NodeConfig config;
  std::optional<ShortAddr> short_addr;
  std::optional<ShortAddr> parent;
  double joined_at = 0.0;

  bool joined() const noexcept { return short_addr.has_value(); }
};

struct Link {
  ShortAddr a;
  ShortAddr b;
  int lqi = 0;
  double distance_m = 0.0;
  int walls = 0;
};

enum class FrameKind { Report, WriteAttributes };

struct Frame {
  std::uint64_t id = 0;
  ShortAddr src;
  ShortAddr dst;
  std::uint16_t cluster_id = 0;
  FrameKind kind = FrameKind::Report;
  std::vector<AttributeReport> attributes;
  std::vector<ShortAddr> hops;
  int lqi_at_receiver = 0;
  std::uint64_t transaction = 0;
};

}  // namespace zgw::sim
