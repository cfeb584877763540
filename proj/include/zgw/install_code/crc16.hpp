#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace zgw::install_code {

/**
 * CRC-16/X-25 as used for Zigbee install codes.
 *
 * - Polynomial: 0x1021 (processed reflected, 0x8408)
 * - Init: 0xFFFF
 * - Reflect in/out: true
 * - XorOut: 0xFFFF
 *
 * Check value: "123456789" -> 0x906E
 */
std::uint16_t crc16_x25(std::span<const std::uint8_t> data) noexcept;

// CRC over an install code, least-significant byte first as it is appended
// to the code. Throws CredentialError(IllegalCodeLength) unless the code is
// 6, 8, 12 or 16 bytes long.
std::array<std::uint8_t, 2> crc16_install_code(std::span<const std::uint8_t> code);

bool is_legal_code_length(std::size_t n) noexcept;

}  // namespace zgw::install_code
