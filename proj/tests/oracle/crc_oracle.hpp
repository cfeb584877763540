#pragma once

// Bit-serial CRC-16/X-25 written as an MSB-first shift register with explicit
// bit reversal of input bytes and the final register. Shares nothing with the
// table-driven reflected implementation it checks.

#include <cstdint>
#include <span>

namespace oracle {

inline std::uint32_t reflect(std::uint32_t v, int bits) {
  std::uint32_t r = 0;
  for (int i = 0; i < bits; ++i) {
    if ((v >> i) & 1u) r |= 1u << (bits - 1 - i);
  }
  return r;
}

inline std::uint16_t crc16_x25_bitwise(std::span<const std::uint8_t> data) {
  std::uint32_t reg = 0xFFFF;
  for (std::uint8_t byte : data) {
    const std::uint32_t b = reflect(byte, 8);
    for (int i = 7; i >= 0; --i) {
      const std::uint32_t in = (b >> i) & 1u;
      const std::uint32_t top = (reg >> 15) & 1u;
      reg = (reg << 1) & 0xFFFF;
      if (top ^ in) reg ^= 0x1021;
    }
  }
  return static_cast<std::uint16_t>(reflect(reg, 16) ^ 0xFFFF);
}

}  // namespace oracle
