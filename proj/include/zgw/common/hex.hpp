#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zgw::hex {

bool is_hex_digit(char c) noexcept;
bool is_hex(std::string_view s) noexcept;

// Case-insensitive. Returns nullopt on odd length or a non-hex character.
std::optional<std::vector<std::uint8_t>> decode(std::string_view s);

// Uppercase, no separators.
std::string encode(std::span<const std::uint8_t> bytes);

}  // namespace zgw::hex
