#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zgw/common/error.hpp"

namespace zgw::install_code {

enum class CredentialErrc {
  EmptyInput,
  NoHexPayload,
  IllegalPayloadLength,
  MalformedField,
  IllegalCodeLength,
  NotAnInstallCode,
  InvalidCrc,
};

std::string_view to_string(CredentialErrc code) noexcept;

using CredentialError = Error<CredentialErrc>;

enum class CredentialKind { InstallCode, PreHashedKey };

enum class VendorFormat { TaggedFields, PipeDelimited, TrailingHex, RawHex };

std::string_view to_string(CredentialKind kind) noexcept;
std::string_view to_string(VendorFormat format) noexcept;

struct Credential {
  CredentialKind kind = CredentialKind::InstallCode;
  std::vector<std::uint8_t> code_bytes;
  std::optional<std::array<std::uint8_t, 2>> crc_bytes;
  VendorFormat vendor_format = VendorFormat::RawHex;

  // Hex of code followed by CRC, as it appeared in the scanned string.
  std::string payload_hex() const;

  friend bool operator==(const Credential&, const Credential&) = default;
};

struct LinkKey {
  std::array<std::uint8_t, 16> key{};

  std::string hex() const;
  static std::optional<LinkKey> from_hex(std::string_view hex);

  friend bool operator==(const LinkKey&, const LinkKey&) = default;
};

enum class Validity { Valid, Invalid };

// Parses a scanned QR string. Grammars are tried in order: `$`/`%` tagged
// fields (the `I` field), `|`-delimited fields, the trailing hex run, raw hex.
Credential parse_qr_payload(std::string_view raw);

// Throws NotAnInstallCode for pre-hashed keys.
Validity validate_install_code(const Credential& cred);

// Install codes hash (code || crc) through MMO; pre-hashed keys pass through.
// Throws InvalidCrc when the install code's CRC does not check.
LinkKey derive_link_key(const Credential& cred);

// Build an install-code credential with a correct CRC appended.
Credential make_install_code(std::vector<std::uint8_t> code,
                             VendorFormat format = VendorFormat::RawHex);

// Export record: kind, payload, code, crc, vendor_format, crc_valid, link_key.
nlohmann::json to_json(const Credential& cred);

}  // namespace zgw::install_code
