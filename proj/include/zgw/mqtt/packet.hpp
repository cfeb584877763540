#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "zgw/common/error.hpp"

namespace zgw::mqtt {

enum class MqttErrc {
  ProtocolError,
  RemainingLengthOverflow,
};

std::string_view to_string(MqttErrc code) noexcept;

// Protocol errors report the byte offset (from the start of the packet) where
// decoding gave up.
class MqttError : public Error<MqttErrc> {
 public:
  MqttError(MqttErrc code, std::string_view detail, std::size_t offset = 0)
      : Error<MqttErrc>(code, detail), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::uint8_t kProtocolLevel311 = 4;
inline constexpr std::size_t kMaxRemainingLength = 268'435'455;

struct Will {
  std::string topic;
  std::string payload;
  std::uint8_t qos = 0;
  bool retain = false;
  friend bool operator==(const Will&, const Will&) = default;
};

struct Connect {
  std::string protocol_name = "MQTT";
  std::uint8_t protocol_level = kProtocolLevel311;
  std::string client_id;
  std::uint16_t keepalive_s = 60;
  bool clean_session = true;
  std::optional<Will> will;
  std::optional<std::string> username;
  std::optional<std::string> password;
  friend bool operator==(const Connect&, const Connect&) = default;
};

namespace connack {
inline constexpr std::uint8_t kAccepted = 0x00;
inline constexpr std::uint8_t kBadProtocolLevel = 0x01;
inline constexpr std::uint8_t kIdentifierRejected = 0x02;
}  // namespace connack

struct Connack {
  bool session_present = false;
  std::uint8_t return_code = connack::kAccepted;
  friend bool operator==(const Connack&, const Connack&) = default;
};

struct Publish {
  std::string topic;
  std::string payload;
  std::uint8_t qos = 0;
  bool retain = false;
  bool dup = false;
  std::optional<std::uint16_t> packet_id;
  friend bool operator==(const Publish&, const Publish&) = default;
};

struct Puback {
  std::uint16_t packet_id = 0;
  friend bool operator==(const Puback&, const Puback&) = default;
};

struct Subscribe {
  std::uint16_t packet_id = 0;
  std::vector<std::pair<std::string, std::uint8_t>> topics;
  friend bool operator==(const Subscribe&, const Subscribe&) = default;
};

inline constexpr std::uint8_t kSubackFailure = 0x80;

struct Suback {
  std::uint16_t packet_id = 0;
  std::vector<std::uint8_t> return_codes;
  friend bool operator==(const Suback&, const Suback&) = default;
};

struct Unsubscribe {
  std::uint16_t packet_id = 0;
  std::vector<std::string> topics;
  friend bool operator==(const Unsubscribe&, const Unsubscribe&) = default;
};

struct Unsuback {
  std::uint16_t packet_id = 0;
  friend bool operator==(const Unsuback&, const Unsuback&) = default;
};

struct Pingreq {
  friend bool operator==(const Pingreq&, const Pingreq&) = default;
};
struct Pingresp {
  friend bool operator==(const Pingresp&, const Pingresp&) = default;
};
struct Disconnect {
  friend bool operator==(const Disconnect&, const Disconnect&) = default;
};

using MqttPacket = std::variant<Connect, Connack, Publish, Puback, Subscribe, Suback, Unsubscribe, Unsuback,
                                Pingreq, Pingresp, Disconnect>;

std::string_view packet_name(const MqttPacket& p) noexcept;

}  // namespace zgw::mqtt
