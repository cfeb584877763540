#include "zgw/mqtt/codec.hpp"

#include <algorithm>

#include "zgw/mqtt/topic.hpp"

namespace zgw::mqtt {

std::string_view to_string(MqttErrc code) noexcept {
  switch (code) {
    case MqttErrc::ProtocolError: return "ProtocolError";
    case MqttErrc::RemainingLengthOverflow: return "RemainingLengthOverflow";
  }
  return "Unknown";
}

std::string_view packet_name(const MqttPacket& p) noexcept {
  static constexpr std::string_view names[] = {"CONNECT", "CONNACK",     "PUBLISH",  "PUBACK",
                                               "SUBSCRIBE", "SUBACK",    "UNSUBSCRIBE", "UNSUBACK",
                                               "PINGREQ", "PINGRESP",    "DISCONNECT"};
  return names[p.index()];
}

namespace {

enum PacketType : std::uint8_t {
  kConnect = 1,
  kConnack = 2,
  kPublish = 3,
  kPuback = 4,
  kPubrec = 5,
  kPubrel = 6,
  kPubcomp = 7,
  kSubscribe = 8,
  kSuback = 9,
  kUnsubscribe = 10,
  kUnsuback = 11,
  kPingreq = 12,
  kPingresp = 13,
  kDisconnect = 14,
};

[[noreturn]] void fail(std::string_view what, std::size_t offset) {
  throw MqttError(MqttErrc::ProtocolError, std::string(what) + " at offset " + std::to_string(offset), offset);
}

// Bounded cursor over one packet body; offsets are reported relative to the
// start of the fixed header.
class Reader {
 public:
  Reader(std::span<const std::uint8_t> body, std::size_t base) : body_(body), base_(base) {}

  std::size_t offset() const { return base_ + pos_; }
  std::size_t remaining() const { return body_.size() - pos_; }
  bool done() const { return pos_ == body_.size(); }

  std::uint8_t u8() {
    need(1);
    return body_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(body_[pos_] << 8 | body_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(body_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::string binary() {
    const std::size_t at = offset();
    const std::uint16_t n = u16();
    if (remaining() < n) fail("length-prefixed field runs past the packet", at);
    return bytes(n);
  }
  std::string utf8() {
    const std::size_t at = offset();
    std::string s = binary();
    if (s.find('\0') != std::string::npos) fail("string contains U+0000", at);
    return s;
  }
  std::string rest() { return bytes(remaining()); }

  void expect_end(std::string_view packet) {
    if (!done()) fail(std::string("trailing bytes in ") + std::string(packet), offset());
  }

 private:
  void need(std::size_t n) {
    if (remaining() < n) fail("truncated packet", offset());
  }

  std::span<const std::uint8_t> body_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

class Writer {
 public:
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  void raw(std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }
  void str(std::string_view s) {
    if (s.size() > 0xFFFF) throw MqttError(MqttErrc::ProtocolError, "string longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    raw(s);
  }
  std::vector<std::uint8_t> out;
};

void check_flags(std::uint8_t flags, std::uint8_t expected, std::uint8_t type) {
  if (flags != expected) fail("invalid fixed header flags for packet type " + std::to_string(type), 0);
}

std::uint16_t nonzero_id(Reader& r) {
  const std::size_t at = r.offset();
  const std::uint16_t id = r.u16();
  if (id == 0) fail("packet identifier must be non-zero", at);
  return id;
}

Connect read_connect(Reader& r) {
  Connect c;
  c.protocol_name = r.utf8();
  if (c.protocol_name != "MQTT") fail("unsupported protocol name", 2);
  c.protocol_level = r.u8();
  const std::size_t flags_at = r.offset();
  const std::uint8_t flags = r.u8();
  if (flags & 0x01) fail("reserved connect flag set", flags_at);
  c.clean_session = flags & 0x02;
  const bool will = flags & 0x04;
  const std::uint8_t will_qos = (flags >> 3) & 0x03;
  const bool will_retain = flags & 0x20;
  const bool password = flags & 0x40;
  const bool username = flags & 0x80;
  if (!will && (will_qos != 0 || will_retain)) fail("will qos/retain without will flag", flags_at);
  if (will_qos == 3) fail("invalid will qos", flags_at);
  if (password && !username) fail("password flag without username", flags_at);
  c.keepalive_s = r.u16();
  c.client_id = r.utf8();
  if (will) {
    Will w;
    w.topic = r.utf8();
    if (!is_valid_topic_name(w.topic)) fail("invalid will topic", r.offset());
    w.payload = r.binary();
    w.qos = will_qos;
    w.retain = will_retain;
    c.will = std::move(w);
  }
  if (username) c.username = r.utf8();
  if (password) c.password = r.binary();
  r.expect_end("CONNECT");
  return c;
}

Publish read_publish(Reader& r, std::uint8_t flags) {
  Publish p;
  p.dup = flags & 0x08;
  p.qos = (flags >> 1) & 0x03;
  p.retain = flags & 0x01;
  if (p.qos == 3) fail("invalid publish qos", 0);
  if (p.qos == 2) fail("qos 2 is not supported", 0);
  if (p.qos == 0 && p.dup) fail("dup flag set on qos 0 publish", 0);
  const std::size_t topic_at = r.offset();
  p.topic = r.utf8();
  if (!is_valid_topic_name(p.topic)) fail("invalid publish topic", topic_at);
  if (p.qos > 0) p.packet_id = nonzero_id(r);
  p.payload = r.rest();
  return p;
}

MqttPacket read_body(std::uint8_t type, std::uint8_t flags, Reader& r) {
  switch (type) {
    case kConnect:
      check_flags(flags, 0, type);
      return read_connect(r);
    case kConnack: {
      check_flags(flags, 0, type);
      Connack c;
      const std::size_t at = r.offset();
      const std::uint8_t ack = r.u8();
      if (ack & 0xFE) fail("reserved connack flags set", at);
      c.session_present = ack & 0x01;
      c.return_code = r.u8();
      r.expect_end("CONNACK");
      return c;
    }
    case kPublish: return read_publish(r, flags);
    case kPuback: {
      check_flags(flags, 0, type);
      Puback p{r.u16()};
      r.expect_end("PUBACK");
      return p;
    }
    case kSubscribe: {
      check_flags(flags, 0x02, type);
      Subscribe s;
      s.packet_id = nonzero_id(r);
      if (r.done()) fail("subscribe without topic filters", r.offset());
      while (!r.done()) {
        std::string filter = r.utf8();
        const std::size_t at = r.offset();
        const std::uint8_t qos = r.u8();
        if (qos > 2) fail("invalid requested qos", at);
        s.topics.emplace_back(std::move(filter), qos);
      }
      return s;
    }
    case kSuback: {
      check_flags(flags, 0, type);
      Suback s;
      s.packet_id = r.u16();
      while (!r.done()) {
        const std::size_t at = r.offset();
        const std::uint8_t code = r.u8();
        if (code > 2 && code != kSubackFailure) fail("invalid suback return code", at);
        s.return_codes.push_back(code);
      }
      return s;
    }
    case kUnsubscribe: {
      check_flags(flags, 0x02, type);
      Unsubscribe u;
      u.packet_id = nonzero_id(r);
      if (r.done()) fail("unsubscribe without topic filters", r.offset());
      while (!r.done()) u.topics.push_back(r.utf8());
      return u;
    }
    case kUnsuback: {
      check_flags(flags, 0, type);
      Unsuback u{r.u16()};
      r.expect_end("UNSUBACK");
      return u;
    }
    case kPingreq:
      check_flags(flags, 0, type);
      r.expect_end("PINGREQ");
      return Pingreq{};
    case kPingresp:
      check_flags(flags, 0, type);
      r.expect_end("PINGRESP");
      return Pingresp{};
    case kDisconnect:
      check_flags(flags, 0, type);
      r.expect_end("DISCONNECT");
      return Disconnect{};
    case kPubrec:
    case kPubrel:
    case kPubcomp: fail("qos 2 flow is not supported", 0);
    default: fail("reserved packet type " + std::to_string(type), 0);
  }
}

struct Encoded {
  std::uint8_t header;
  Writer body;
};

Encoded write_body(const MqttPacket& packet) {
  Encoded e{};
  Writer& w = e.body;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Connect>) {
          e.header = kConnect << 4;
          w.str(p.protocol_name);
          w.u8(p.protocol_level);
          std::uint8_t flags = 0;
          if (p.clean_session) flags |= 0x02;
          if (p.will) {
            flags |= 0x04;
            flags |= static_cast<std::uint8_t>((p.will->qos & 0x03) << 3);
            if (p.will->retain) flags |= 0x20;
          }
          if (p.password) flags |= 0x40;
          if (p.username) flags |= 0x80;
          w.u8(flags);
          w.u16(p.keepalive_s);
          w.str(p.client_id);
          if (p.will) {
            w.str(p.will->topic);
            w.str(p.will->payload);
          }
          if (p.username) w.str(*p.username);
          if (p.password) w.str(*p.password);
        } else if constexpr (std::is_same_v<T, Connack>) {
          e.header = kConnack << 4;
          w.u8(p.session_present ? 1 : 0);
          w.u8(p.return_code);
        } else if constexpr (std::is_same_v<T, Publish>) {
          if (p.qos > 1) throw MqttError(MqttErrc::ProtocolError, "qos 2 is not supported");
          if (p.qos > 0 && !p.packet_id) throw MqttError(MqttErrc::ProtocolError, "qos 1 publish needs a packet id");
          e.header = static_cast<std::uint8_t>(kPublish << 4 | (p.dup ? 0x08 : 0) | (p.qos << 1) | (p.retain ? 1 : 0));
          w.str(p.topic);
          if (p.qos > 0) w.u16(*p.packet_id);
          w.raw(p.payload);
        } else if constexpr (std::is_same_v<T, Puback>) {
          e.header = kPuback << 4;
          w.u16(p.packet_id);
        } else if constexpr (std::is_same_v<T, Subscribe>) {
          e.header = kSubscribe << 4 | 0x02;
          w.u16(p.packet_id);
          for (const auto& [filter, qos] : p.topics) {
            w.str(filter);
            w.u8(qos);
          }
        } else if constexpr (std::is_same_v<T, Suback>) {
          e.header = kSuback << 4;
          w.u16(p.packet_id);
          for (auto c : p.return_codes) w.u8(c);
        } else if constexpr (std::is_same_v<T, Unsubscribe>) {
          e.header = kUnsubscribe << 4 | 0x02;
          w.u16(p.packet_id);
          for (const auto& f : p.topics) w.str(f);
        } else if constexpr (std::is_same_v<T, Unsuback>) {
          e.header = kUnsuback << 4;
          w.u16(p.packet_id);
        } else if constexpr (std::is_same_v<T, Pingreq>) {
          e.header = kPingreq << 4;
        } else if constexpr (std::is_same_v<T, Pingresp>) {
          e.header = kPingresp << 4;
        } else if constexpr (std::is_same_v<T, Disconnect>) {
          e.header = kDisconnect << 4;
        }
      },
      packet);
  return e;
}

}  // namespace

std::vector<std::uint8_t> encode_remaining_length(std::size_t value) {
  if (value > kMaxRemainingLength) {
    throw MqttError(MqttErrc::RemainingLengthOverflow, std::to_string(value) + " exceeds 268435455");
  }
  std::vector<std::uint8_t> out;
  do {
    std::uint8_t byte = value % 128;
    value /= 128;
    if (value > 0) byte |= 0x80;
    out.push_back(byte);
  } while (value > 0);
  return out;
}

std::optional<RemainingLength> decode_remaining_length(std::span<const std::uint8_t> bytes) {
  std::size_t value = 0;
  std::size_t multiplier = 1;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size()) return std::nullopt;
    const std::uint8_t b = bytes[i];
    value += (b & 0x7F) * multiplier;
    if (!(b & 0x80)) {
      // Reject padded encodings such as 0x80 0x00.
      if (i > 0 && (b & 0x7F) == 0) {
        throw MqttError(MqttErrc::ProtocolError, "non-minimal remaining length encoding", 1 + i);
      }
      return RemainingLength{value, i + 1};
    }
    multiplier *= 128;
  }
  throw MqttError(MqttErrc::RemainingLengthOverflow, "remaining length longer than 4 bytes", 4);
}

DecodeResult decode_packet(std::span<const std::uint8_t> bytes) {
  DecodeResult result;
  if (bytes.empty()) return result;
  const std::uint8_t header = bytes[0];
  const auto len = decode_remaining_length(bytes.subspan(1));
  if (!len) return result;
  const std::size_t header_len = 1 + len->bytes;
  if (bytes.size() - header_len < len->value) return result;
  Reader reader(bytes.subspan(header_len, len->value), header_len);
  result.packet = read_body(header >> 4, header & 0x0F, reader);
  result.status = DecodeStatus::Complete;
  result.consumed = header_len + len->value;
  return result;
}

std::vector<std::uint8_t> encode_packet(const MqttPacket& packet) {
  Encoded e = write_body(packet);
  std::vector<std::uint8_t> out;
  const auto len = encode_remaining_length(e.body.out.size());
  out.reserve(1 + len.size() + e.body.out.size());
  out.push_back(e.header);
  out.insert(out.end(), len.begin(), len.end());
  out.insert(out.end(), e.body.out.begin(), e.body.out.end());
  return out;
}

}  // namespace zgw::mqtt
