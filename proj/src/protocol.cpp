#include "hcn/protocol.hpp"

#include <cmath>

namespace hcn {

namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'C', 'N', '1'};

std::size_t payload_size(MessageKind kind) {
  switch (kind) {
    case MessageKind::CHANNEL_APPOINTMENT: return 6;
    case MessageKind::APPOINTMENT_RESPONSE: return 4;
    case MessageKind::WAKEUP_COMMAND:
    case MessageKind::WAKEUP_ACK:
    case MessageKind::LINK_RELEASE: return 4;
    case MessageKind::STATUS_REPORT: return 2;
  }
  return 0;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked big-endian reader; never reads past the span.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  std::uint8_t peek() const { return bytes_[pos_]; }
  std::uint8_t u8() { return bytes_[pos_++]; }
  std::uint16_t u16() {
    auto hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32() {
    std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::CHANNEL_APPOINTMENT: return "CHANNEL_APPOINTMENT";
    case MessageKind::APPOINTMENT_RESPONSE: return "APPOINTMENT_RESPONSE";
    case MessageKind::WAKEUP_COMMAND: return "WAKEUP_COMMAND";
    case MessageKind::WAKEUP_ACK: return "WAKEUP_ACK";
    case MessageKind::LINK_RELEASE: return "LINK_RELEASE";
    case MessageKind::STATUS_REPORT: return "STATUS_REPORT";
  }
  return "?";
}

std::string_view to_string(ServiceKind k) { return k == ServiceKind::MO_CALL ? "MO" : "MT"; }

std::string_view to_string(PowerState p) {
  switch (p) {
    case PowerState::SLEEP: return "SLEEP";
    case PowerState::ACTIVE: return "ACTIVE";
    case PowerState::WAKING: return "WAKING";
  }
  return "?";
}

std::string_view to_string(DecodeErrorKind k) {
  switch (k) {
    case DecodeErrorKind::BAD_MAGIC: return "BAD_MAGIC";
    case DecodeErrorKind::BAD_VERSION: return "BAD_VERSION";
    case DecodeErrorKind::UNKNOWN_TAG: return "UNKNOWN_TAG";
    case DecodeErrorKind::TRUNCATED: return "TRUNCATED";
    case DecodeErrorKind::TRAILING_BYTES: return "TRAILING_BYTES";
    case DecodeErrorKind::BAD_FIELD: return "BAD_FIELD";
  }
  return "?";
}

std::string_view to_string(Delivery d) {
  switch (d) {
    case Delivery::DELIVER: return "DELIVER";
    case Delivery::DROP_DUPLICATE: return "DROP_DUPLICATE";
    case Delivery::DROP_STALE: return "DROP_STALE";
  }
  return "?";
}

std::uint8_t quantize_load(double load) {
  if (!(load >= 0.0 && load <= 1.0)) {
    throw std::out_of_range("load " + std::to_string(load) + " outside [0,1]");
  }
  return static_cast<std::uint8_t>(std::lround(load * 255.0));
}

StatusReport::StatusReport(PowerState power, double load) : power_(power), load_byte_(quantize_load(load)) {
  if (power == PowerState::WAKING) throw std::out_of_range("STATUS_REPORT cannot carry WAKING");
}

StatusReport StatusReport::from_wire(PowerState power, std::uint8_t load_byte) {
  StatusReport r(power, 0.0);
  r.load_byte_ = load_byte;
  return r;
}

MessageKind ControlMessage::kind() const {
  return static_cast<MessageKind>(payload.index() + 1);
}

Bytes encode(const ControlMessage& msg, const MessageHeader& header) {
  Writer w;
  for (std::uint8_t b : kMagic) w.u8(b);
  w.u8(kProtocolVersion);
  w.u8(static_cast<std::uint8_t>(msg.kind()));
  w.u16(header.sender_id);
  w.u32(header.seq);
  w.u32(msg.transaction_id);

  std::visit(
      [&w](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ChannelAppointment>) {
          if (p.service != ServiceKind::MO_CALL && p.service != ServiceKind::MT_CALL) {
            throw EncodeError("invalid service kind");
          }
          w.u32(p.ms_id);
          w.u8(static_cast<std::uint8_t>(p.service));
          w.u8(p.slot);
        } else if constexpr (std::is_same_v<T, AppointmentResponse>) {
          w.u8(p.accept ? 1 : 0);
          w.u16(p.arfcn);
          w.u8(p.slot);
        } else if constexpr (std::is_same_v<T, WakeupCommand> || std::is_same_v<T, WakeupAck>) {
          w.u32(p.dbs_id);
        } else if constexpr (std::is_same_v<T, LinkRelease>) {
          w.u32(p.ms_id);
        } else {
          if (p.power() == PowerState::WAKING) throw EncodeError("STATUS_REPORT cannot carry WAKING");
          w.u8(static_cast<std::uint8_t>(p.power()));
          w.u8(p.load_byte());
        }
      },
      msg.payload);
  return w.take();
}

DecodeResult decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto truncated = [&r] { return DecodeError{DecodeErrorKind::TRUNCATED, r.size()}; };

  for (std::uint8_t expect : kMagic) {
    if (!r.has(1)) return truncated();
    std::size_t at = r.pos();
    if (r.u8() != expect) return DecodeError{DecodeErrorKind::BAD_MAGIC, at};
  }
  if (!r.has(1)) return truncated();
  if (r.peek() != kProtocolVersion) return DecodeError{DecodeErrorKind::BAD_VERSION, r.pos()};
  r.u8();
  if (!r.has(1)) return truncated();
  const std::uint8_t tag = r.peek();
  if (tag < 0x01 || tag > 0x06) return DecodeError{DecodeErrorKind::UNKNOWN_TAG, r.pos()};
  r.u8();
  const auto kind = static_cast<MessageKind>(tag);

  if (!r.has(kHeaderSize - 6)) return truncated();
  Decoded out;
  out.header.sender_id = r.u16();
  out.header.seq = r.u32();
  out.message.transaction_id = r.u32();

  if (!r.has(payload_size(kind))) return truncated();
  switch (kind) {
    case MessageKind::CHANNEL_APPOINTMENT: {
      ChannelAppointment p;
      p.ms_id = r.u32();
      const std::size_t at = r.pos();
      const std::uint8_t service = r.u8();
      if (service != 0x01 && service != 0x02) return DecodeError{DecodeErrorKind::BAD_FIELD, at};
      p.service = static_cast<ServiceKind>(service);
      p.slot = r.u8();
      out.message.payload = p;
      break;
    }
    case MessageKind::APPOINTMENT_RESPONSE: {
      AppointmentResponse p;
      const std::size_t at = r.pos();
      const std::uint8_t accept = r.u8();
      if (accept > 1) return DecodeError{DecodeErrorKind::BAD_FIELD, at};
      p.accept = accept == 1;
      p.arfcn = r.u16();
      p.slot = r.u8();
      out.message.payload = p;
      break;
    }
    case MessageKind::WAKEUP_COMMAND:
      out.message.payload = WakeupCommand{r.u32()};
      break;
    case MessageKind::WAKEUP_ACK:
      out.message.payload = WakeupAck{r.u32()};
      break;
    case MessageKind::LINK_RELEASE:
      out.message.payload = LinkRelease{r.u32()};
      break;
    case MessageKind::STATUS_REPORT: {
      const std::size_t at = r.pos();
      const std::uint8_t power = r.u8();
      if (power > 1) return DecodeError{DecodeErrorKind::BAD_FIELD, at};
      out.message.payload = StatusReport::from_wire(static_cast<PowerState>(power), r.u8());
      break;
    }
  }
  if (r.pos() != r.size()) return DecodeError{DecodeErrorKind::TRAILING_BYTES, r.pos()};
  return out;
}

Delivery accept_in_order(PeerChannelState& state, const MessageHeader& header) {
  const auto it = state.last_seq_seen.find(header.sender_id);
  const std::uint32_t last = it == state.last_seq_seen.end() ? 0u : it->second;
  if (header.seq > last) {
    state.last_seq_seen[header.sender_id] = header.seq;
    return Delivery::DELIVER;
  }
  if (header.seq == last) {
    ++state.duplicates;
    return Delivery::DROP_DUPLICATE;
  }
  ++state.stale;
  return Delivery::DROP_STALE;
}

MessageHeader ControlEndpoint::next_header(std::uint16_t peer) {
  return MessageHeader{self_id_, ++next_seq_[peer]};
}

}  // namespace hcn
