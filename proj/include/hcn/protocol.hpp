// SBS <-> DBS coordination messages and their datagram encoding.
//
// Wire layout, all multi-byte fields big-endian:
//
//   offset  size  field
//   0       4     magic "HCN1"
//   4       1     version (1)
//   5       1     variant tag (0x01..0x06)
//   6       2     sender id
//   8       4     sequence number
//   12      4     transaction id
//   16      ...   variant payload
//
//   0x01 CHANNEL_APPOINTMENT   ms_id u32, service u8 (1 MO, 2 MT), slot u8
//   0x02 APPOINTMENT_RESPONSE  accept u8 (0/1), arfcn u16, slot u8
//   0x03 WAKEUP_COMMAND        dbs_id u32
//   0x04 WAKEUP_ACK            dbs_id u32
//   0x05 LINK_RELEASE          ms_id u32
//   0x06 STATUS_REPORT         power u8 (0 SLEEP, 1 ACTIVE), load u8 (round(load*255))
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hcn {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kMaxDatagramSize = 64;

/// Appointment slot value meaning "DBS picks the lowest free slot".
inline constexpr std::uint8_t kAnySlot = 0xFF;

enum class MessageKind : std::uint8_t {
  CHANNEL_APPOINTMENT = 0x01,
  APPOINTMENT_RESPONSE = 0x02,
  WAKEUP_COMMAND = 0x03,
  WAKEUP_ACK = 0x04,
  LINK_RELEASE = 0x05,
  STATUS_REPORT = 0x06,
};

enum class ServiceKind : std::uint8_t { MO_CALL = 0x01, MT_CALL = 0x02 };

enum class PowerState : std::uint8_t { SLEEP = 0, ACTIVE = 1, WAKING = 2 };

std::string_view to_string(MessageKind k);
std::string_view to_string(ServiceKind k);
std::string_view to_string(PowerState p);

struct ChannelAppointment {
  std::uint32_t ms_id = 0;
  ServiceKind service = ServiceKind::MO_CALL;
  std::uint8_t slot = kAnySlot;
  bool operator==(const ChannelAppointment&) const = default;
};

struct AppointmentResponse {
  bool accept = false;
  std::uint16_t arfcn = 0;
  std::uint8_t slot = 0;
  bool operator==(const AppointmentResponse&) const = default;
};

struct WakeupCommand {
  std::uint32_t dbs_id = 0;
  bool operator==(const WakeupCommand&) const = default;
};

struct WakeupAck {
  std::uint32_t dbs_id = 0;
  bool operator==(const WakeupAck&) const = default;
};

struct LinkRelease {
  std::uint32_t ms_id = 0;
  bool operator==(const LinkRelease&) const = default;
};

/// Load is carried quantized to 1/255 steps.
class StatusReport {
 public:
  StatusReport() = default;
  /// Throws std::out_of_range for load outside [0,1] or a WAKING power state.
  StatusReport(PowerState power, double load);
  static StatusReport from_wire(PowerState power, std::uint8_t load_byte);

  PowerState power() const { return power_; }
  std::uint8_t load_byte() const { return load_byte_; }
  double load() const { return load_byte_ / 255.0; }
  bool operator==(const StatusReport&) const = default;

 private:
  PowerState power_ = PowerState::SLEEP;
  std::uint8_t load_byte_ = 0;
};

std::uint8_t quantize_load(double load);

using MessagePayload = std::variant<ChannelAppointment, AppointmentResponse, WakeupCommand, WakeupAck,
                                    LinkRelease, StatusReport>;

struct ControlMessage {
  std::uint32_t transaction_id = 0;
  MessagePayload payload;

  MessageKind kind() const;
  bool operator==(const ControlMessage&) const = default;
};

struct MessageHeader {
  std::uint16_t sender_id = 0;
  std::uint32_t seq = 0;
  bool operator==(const MessageHeader&) const = default;
};

/// Thrown by encode() for payload values that cannot go on the wire.
class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Bytes encode(const ControlMessage& msg, const MessageHeader& header);

enum class DecodeErrorKind : std::uint8_t {
  BAD_MAGIC,
  BAD_VERSION,
  UNKNOWN_TAG,
  TRUNCATED,
  TRAILING_BYTES,
  BAD_FIELD,  // enumerated payload byte outside its defined values
};

std::string_view to_string(DecodeErrorKind k);

struct DecodeError {
  DecodeErrorKind kind;
  std::size_t offset;
  bool operator==(const DecodeError&) const = default;
};

struct Decoded {
  MessageHeader header;
  ControlMessage message;
  bool operator==(const Decoded&) const = default;
};

using DecodeResult = std::variant<Decoded, DecodeError>;

DecodeResult decode(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Ordering over an unreliable datagram transport.

enum class Delivery : std::uint8_t { DELIVER, DROP_DUPLICATE, DROP_STALE };

std::string_view to_string(Delivery d);

struct PeerChannelState {
  std::map<std::uint16_t, std::uint32_t> last_seq_seen;
  std::uint64_t duplicates = 0;
  std::uint64_t stale = 0;
};

/// Delivers iff seq is newer than anything seen from that sender. Sequence
/// numbers start at 1; wraparound is not handled.
Delivery accept_in_order(PeerChannelState& state, const MessageHeader& header);

/// Per-station framing state: outbound sequence counters per peer plus the
/// inbound ordering filter.
class ControlEndpoint {
 public:
  explicit ControlEndpoint(std::uint16_t self_id) : self_id_(self_id) {}

  std::uint16_t self_id() const { return self_id_; }
  MessageHeader next_header(std::uint16_t peer);
  Bytes frame(std::uint16_t peer, const ControlMessage& msg) { return encode(msg, next_header(peer)); }
  Delivery admit(const MessageHeader& header) { return accept_in_order(inbound_, header); }
  const PeerChannelState& inbound() const { return inbound_; }

 private:
  std::uint16_t self_id_;
  std::map<std::uint16_t, std::uint32_t> next_seq_;
  PeerChannelState inbound_;
};

}  // namespace hcn
