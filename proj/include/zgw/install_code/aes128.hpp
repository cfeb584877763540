#pragma once

#include <array>
#include <cstdint>

namespace zgw::install_code {

using Block = std::array<std::uint8_t, 16>;

// AES-128 forward cipher only; MMO never decrypts.
class Aes128 {
 public:
  explicit Aes128(const Block& key) noexcept;

  Block encrypt(const Block& plaintext) const noexcept;

 private:
  std::array<std::array<std::uint8_t, 16>, 11> round_keys_{};
};

}  // namespace zgw::install_code
