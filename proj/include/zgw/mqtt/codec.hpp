#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zgw/mqtt/packet.hpp"

namespace zgw::mqtt {

// 1-4 byte variable length encoding. Throws RemainingLengthOverflow above
// 268 435 455.
std::vector<std::uint8_t> encode_remaining_length(std::size_t value);

struct RemainingLength {
  std::size_t value = 0;
  std::size_t bytes = 0;
};

// nullopt when the buffer ends inside the length field.
std::optional<RemainingLength> decode_remaining_length(std::span<const std::uint8_t> bytes);

enum class DecodeStatus { Complete, NeedMoreData };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::NeedMoreData;
  MqttPacket packet;
  std::size_t consumed = 0;
};

// Decodes at most one packet from the front of `bytes`; never reads past the
// declared remaining length. Malformed input throws MqttError.
DecodeResult decode_packet(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_packet(const MqttPacket& packet);

}  // namespace zgw::mqtt
