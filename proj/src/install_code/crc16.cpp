#include "zgw/install_code/crc16.hpp"

#include <string>

#include "zgw/install_code/credential.hpp"

namespace zgw::install_code {

namespace {

constexpr std::array<std::uint16_t, 256> make_table() {
  std::array<std::uint16_t, 256> table{};
  for (std::uint16_t i = 0; i < 256; ++i) {
    std::uint16_t crc = i;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 1) ? static_cast<std::uint16_t>((crc >> 1) ^ 0x8408) : static_cast<std::uint16_t>(crc >> 1);
    }
    table[i] = crc;
  }
  return table;
}

constexpr auto kTable = make_table();

}  // namespace

std::uint16_t crc16_x25(std::span<const std::uint8_t> data) noexcept {
  std::uint16_t crc = 0xFFFF;
  for (auto b : data) {
    crc = static_cast<std::uint16_t>((crc >> 8) ^ kTable[(crc ^ b) & 0xFF]);
  }
  return static_cast<std::uint16_t>(crc ^ 0xFFFF);
}

bool is_legal_code_length(std::size_t n) noexcept {
  return n == 6 || n == 8 || n == 12 || n == 16;
}

std::array<std::uint8_t, 2> crc16_install_code(std::span<const std::uint8_t> code) {
  if (!is_legal_code_length(code.size())) {
    throw CredentialError(CredentialErrc::IllegalCodeLength,
                          std::to_string(code.size()) + " bytes");
  }
  const auto crc = crc16_x25(code);
  return {static_cast<std::uint8_t>(crc & 0xFF), static_cast<std::uint8_t>(crc >> 8)};
}

}  // namespace zgw::install_code
