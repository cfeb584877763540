#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace zgw::install_code {

/// Matyas-Meyer-Oseas hash over AES-128 with Zigbee padding.
///
/// The chaining value starts at zero and each block M_i updates it as
/// H_i = E(H_{i-1}, M_i) ^ M_i. Messages shorter than 2^16 bits are padded with
/// 0x80, zeros, and a 16-bit big-endian bit length; longer messages use the
/// 32-bit length form followed by two zero bytes.
///
/// Throws CredentialError(EmptyInput) for an empty input.
std::array<std::uint8_t, 16> mmo_hash(std::span<const std::uint8_t> input);

}  // namespace zgw::install_code
