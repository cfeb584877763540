#include "zgw/install_code/credential.hpp"

#include <algorithm>
#include <cctype>

#include "zgw/common/hex.hpp"
#include "zgw/install_code/crc16.hpp"
#include "zgw/install_code/mmo.hpp"

namespace zgw::install_code {

std::string_view to_string(CredentialErrc code) noexcept {
  switch (code) {
    case CredentialErrc::EmptyInput: return "EmptyInput";
    case CredentialErrc::NoHexPayload: return "NoHexPayload";
    case CredentialErrc::IllegalPayloadLength: return "IllegalPayloadLength";
    case CredentialErrc::MalformedField: return "MalformedField";
    case CredentialErrc::IllegalCodeLength: return "IllegalCodeLength";
    case CredentialErrc::NotAnInstallCode: return "NotAnInstallCode";
    case CredentialErrc::InvalidCrc: return "InvalidCrc";
  }
  return "Unknown";
}

std::string_view to_string(CredentialKind kind) noexcept {
  return kind == CredentialKind::InstallCode ? "install_code" : "pre_hashed_key";
}

std::string_view to_string(VendorFormat format) noexcept {
  switch (format) {
    case VendorFormat::TaggedFields: return "tagged_fields";
    case VendorFormat::PipeDelimited: return "pipe_delimited";
    case VendorFormat::TrailingHex: return "trailing_hex";
    case VendorFormat::RawHex: return "raw_hex";
  }
  return "unknown";
}

std::string Credential::payload_hex() const {
  std::string out = hex::encode(code_bytes);
  if (crc_bytes) out += hex::encode(*crc_bytes);
  return out;
}

std::string LinkKey::hex() const { return hex::encode(key); }

std::optional<LinkKey> LinkKey::from_hex(std::string_view text) {
  auto bytes = hex::decode(text);
  if (!bytes || bytes->size() != 16) return std::nullopt;
  LinkKey k;
  std::copy(bytes->begin(), bytes->end(), k.key.begin());
  return k;
}

namespace {

constexpr std::size_t kPreHashedHexLen = 32;

bool is_legal_payload_len(std::size_t n) noexcept {
  return n == 16 || n == 20 || n == 28 || n == 36 || n == kPreHashedHexLen;
}

struct Candidate {
  std::string_view hex;
  VendorFormat format;
};

// Collects the first failure seen while grammars are tried in order, so the
// reported error is the one from the most self-announcing grammar.
struct Attempts {
  std::optional<CredentialError> first_error;

  void fail(CredentialErrc code, std::string_view detail) {
    if (!first_error) first_error.emplace(code, detail);
  }
};

std::optional<Candidate> check_candidate(std::string_view text, VendorFormat format,
                                         Attempts& attempts) {
  if (!hex::is_hex(text)) {
    attempts.fail(CredentialErrc::MalformedField, "non-hex payload field");
    return std::nullopt;
  }
  if (!is_legal_payload_len(text.size())) {
    attempts.fail(CredentialErrc::IllegalPayloadLength,
                  std::to_string(text.size()) + " hex characters");
    return std::nullopt;
  }
  return Candidate{text, format};
}

std::optional<Candidate> try_tagged(std::string_view s, Attempts& attempts) {
  auto is_sep = [](char c) { return c == '$' || c == '%'; };
  std::size_t pos = 0;
  while (pos < s.size() && !is_sep(s[pos])) ++pos;
  if (pos == s.size()) return std::nullopt;

  std::optional<std::string_view> install_field;
  bool duplicate = false;
  // Fields look like <sep><tag>[:<value>]; tags other than `I` are skipped,
  // including bare flags such as `%Z`.
  while (pos < s.size()) {
    std::size_t end = pos + 1;
    while (end < s.size() && !is_sep(s[end])) ++end;
    const auto field = s.substr(pos + 1, end - pos - 1);
    if (field.size() >= 2 && field[0] == 'I' && field[1] == ':') {
      if (install_field) duplicate = true;
      install_field = field.substr(2);
    }
    pos = end;
  }
  if (duplicate) {
    attempts.fail(CredentialErrc::MalformedField, "repeated I field");
    return std::nullopt;
  }
  if (!install_field) return std::nullopt;
  if (install_field->empty()) {
    attempts.fail(CredentialErrc::MalformedField, "empty I field");
    return std::nullopt;
  }
  return check_candidate(*install_field, VendorFormat::TaggedFields, attempts);
}

std::optional<Candidate> try_pipe(std::string_view s, Attempts& attempts) {
  if (s.find('|') == std::string_view::npos) return std::nullopt;
  std::vector<std::string_view> matches;
  std::size_t begin = 0;
  while (begin <= s.size()) {
    auto end = s.find('|', begin);
    if (end == std::string_view::npos) end = s.size();
    auto field = s.substr(begin, end - begin);
    if (hex::is_hex(field) && is_legal_payload_len(field.size())) matches.push_back(field);
    begin = end + 1;
  }
  if (matches.size() > 1) {
    attempts.fail(CredentialErrc::MalformedField, "ambiguous pipe-delimited payload");
    return std::nullopt;
  }
  if (matches.empty()) return std::nullopt;
  return Candidate{matches.front(), VendorFormat::PipeDelimited};
}

std::optional<Candidate> try_trailing(std::string_view s, Attempts& attempts) {
  std::size_t start = s.size();
  while (start > 0 && hex::is_hex_digit(s[start - 1])) --start;
  if (start == s.size()) return std::nullopt;
  const auto format = start == 0 ? VendorFormat::RawHex : VendorFormat::TrailingHex;
  return check_candidate(s.substr(start), format, attempts);
}

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Credential parse_qr_payload(std::string_view raw) {
  const auto s = trim(raw);
  if (s.empty()) throw CredentialError(CredentialErrc::EmptyInput);
  for (char c : s) {
    if (!std::isprint(static_cast<unsigned char>(c))) {
      throw CredentialError(CredentialErrc::MalformedField, "non-printable character");
    }
  }

  Attempts attempts;
  std::optional<Candidate> found = try_tagged(s, attempts);
  if (!found) found = try_pipe(s, attempts);
  if (!found) found = try_trailing(s, attempts);
  if (!found) {
    if (attempts.first_error) throw *attempts.first_error;
    throw CredentialError(CredentialErrc::NoHexPayload);
  }

  auto bytes = *hex::decode(found->hex);
  Credential cred;
  cred.vendor_format = found->format;
  if (found->hex.size() == kPreHashedHexLen) {
    cred.kind = CredentialKind::PreHashedKey;
    cred.code_bytes = std::move(bytes);
  } else {
    cred.kind = CredentialKind::InstallCode;
    cred.crc_bytes = std::array<std::uint8_t, 2>{bytes[bytes.size() - 2], bytes[bytes.size() - 1]};
    bytes.resize(bytes.size() - 2);
    cred.code_bytes = std::move(bytes);
  }
  return cred;
}

Validity validate_install_code(const Credential& cred) {
  if (cred.kind != CredentialKind::InstallCode || !cred.crc_bytes) {
    throw CredentialError(CredentialErrc::NotAnInstallCode);
  }
  return crc16_install_code(cred.code_bytes) == *cred.crc_bytes ? Validity::Valid
                                                                : Validity::Invalid;
}

LinkKey derive_link_key(const Credential& cred) {
  LinkKey out;
  if (cred.kind == CredentialKind::PreHashedKey) {
    if (cred.code_bytes.size() != out.key.size()) {
      throw CredentialError(CredentialErrc::IllegalPayloadLength, "pre-hashed key must be 16 bytes");
    }
    std::copy(cred.code_bytes.begin(), cred.code_bytes.end(), out.key.begin());
    return out;
  }
  if (validate_install_code(cred) != Validity::Valid) {
    throw CredentialError(CredentialErrc::InvalidCrc, cred.payload_hex());
  }
  std::vector<std::uint8_t> input = cred.code_bytes;
  input.insert(input.end(), cred.crc_bytes->begin(), cred.crc_bytes->end());
  out.key = mmo_hash(input);
  return out;
}

Credential make_install_code(std::vector<std::uint8_t> code, VendorFormat format) {
  Credential cred;
  cred.kind = CredentialKind::InstallCode;
  cred.crc_bytes = crc16_install_code(code);
  cred.code_bytes = std::move(code);
  cred.vendor_format = format;
  return cred;
}

nlohmann::json to_json(const Credential& cred) {
  nlohmann::json j;
  j["kind"] = to_string(cred.kind);
  j["payload"] = cred.payload_hex();
  j["code"] = hex::encode(cred.code_bytes);
  j["vendor_format"] = to_string(cred.vendor_format);
  if (cred.kind == CredentialKind::InstallCode) {
    j["crc"] = cred.crc_bytes ? hex::encode(*cred.crc_bytes) : std::string{};
    const bool valid = validate_install_code(cred) == Validity::Valid;
    j["crc_valid"] = valid;
    j["link_key"] = valid ? nlohmann::json(derive_link_key(cred).hex()) : nlohmann::json(nullptr);
  } else {
    j["crc"] = nullptr;
    j["crc_valid"] = nullptr;
    j["link_key"] = derive_link_key(cred).hex();
  }
  return j;
}

}  // namespace zgw::install_code
