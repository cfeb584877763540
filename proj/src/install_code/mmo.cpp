#include "zgw/install_code/mmo.hpp"

#include <vector>

#include "zgw/install_code/aes128.hpp"
#include "zgw/install_code/credential.hpp"

namespace zgw::install_code {

namespace {

std::vector<std::uint8_t> pad(std::span<const std::uint8_t> input) {
  const std::uint64_t bit_len = static_cast<std::uint64_t>(input.size()) * 8;
  std::vector<std::uint8_t> msg(input.begin(), input.end());
  msg.push_back(0x80);
  if (bit_len < 0x10000) {
    while (msg.size() % 16 != 14) msg.push_back(0x00);
    msg.push_back(static_cast<std::uint8_t>(bit_len >> 8));
    msg.push_back(static_cast<std::uint8_t>(bit_len));
  } else {
    while (msg.size() % 16 != 10) msg.push_back(0x00);
    for (int shift = 24; shift >= 0; shift -= 8) {
      msg.push_back(static_cast<std::uint8_t>(bit_len >> shift));
    }
    msg.push_back(0x00);
    msg.push_back(0x00);
  }
  return msg;
}

}  // namespace

std::array<std::uint8_t, 16> mmo_hash(std::span<const std::uint8_t> input) {
  if (input.empty()) throw CredentialError(CredentialErrc::EmptyInput, "mmo_hash input");
  const auto msg = pad(input);
  Block chain{};
  for (std::size_t off = 0; off < msg.size(); off += 16) {
    Block block;
    std::copy_n(msg.begin() + static_cast<std::ptrdiff_t>(off), 16, block.begin());
    const Block enc = Aes128(chain).encrypt(block);
    for (int i = 0; i < 16; ++i) chain[i] = enc[i] ^ block[i];
  }
  return chain;
}

}  // namespace zgw::install_code
