// GSM Um logical channels, TDMA timing and the SBS/DBS split of channels and
// functionalities between signaling and data base stations.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hcn {

enum class LogicalChannel : std::uint8_t {
  FCCH,
  SCH,
  BCCH,
  PCH,
  NCH,
  RACH,
  AGCH,
  SDCCH,
  SACCH,
  FACCH,
  TCH,
};

inline constexpr std::size_t kLogicalChannelCount = 11;

inline constexpr std::array<LogicalChannel, kLogicalChannelCount> kAllLogicalChannels = {
    LogicalChannel::FCCH,  LogicalChannel::SCH,   LogicalChannel::BCCH, LogicalChannel::PCH,
    LogicalChannel::NCH,   LogicalChannel::RACH,  LogicalChannel::AGCH, LogicalChannel::SDCCH,
    LogicalChannel::SACCH, LogicalChannel::FACCH, LogicalChannel::TCH,
};

enum class ChannelGroup : std::uint8_t { BCH, CCCH, DCCH, TCH_GROUP };

enum class Role : std::uint8_t { SBS, DBS };

enum class Functionality : std::uint8_t { SYNCHRONIZATION, BROADCASTING, PAGING, DATA_TRAFFIC };

inline constexpr std::array<Functionality, 4> kAllFunctionalities = {
    Functionality::SYNCHRONIZATION, Functionality::BROADCASTING, Functionality::PAGING,
    Functionality::DATA_TRAFFIC};

std::string_view to_string(LogicalChannel ch);
std::string_view to_string(ChannelGroup g);
std::string_view to_string(Role r);
std::string_view to_string(Functionality f);
std::optional<LogicalChannel> parse_logical_channel(std::string_view name);

/// Small value set of roles, {SBS}, {DBS} or both.
class RoleSet {
 public:
  constexpr RoleSet() = default;
  constexpr RoleSet(std::initializer_list<Role> roles) {
    for (Role r : roles) insert(r);
  }
  constexpr void insert(Role r) { bits_ |= bit(r); }
  constexpr bool contains(Role r) const { return (bits_ & bit(r)) != 0; }
  constexpr std::size_t size() const { return (bits_ & 1u) + ((bits_ >> 1) & 1u); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr RoleSet operator|(RoleSet o) const {
    RoleSet r;
    r.bits_ = bits_ | o.bits_;
    return r;
  }
  constexpr bool operator==(const RoleSet&) const = default;

 private:
  static constexpr std::uint8_t bit(Role r) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r)); }
  std::uint8_t bits_ = 0;
};

/// Set of logical channels backed by an 11-bit mask.
class ChannelSet {
 public:
  constexpr ChannelSet() = default;
  constexpr ChannelSet(std::initializer_list<LogicalChannel> channels) {
    for (LogicalChannel c : channels) insert(c);
  }
  static constexpr ChannelSet from_mask(std::uint16_t mask) {
    ChannelSet s;
    s.mask_ = mask & kFullMask;
    return s;
  }

  constexpr void insert(LogicalChannel c) { mask_ |= bit(c); }
  constexpr void erase(LogicalChannel c) { mask_ &= static_cast<std::uint16_t>(~bit(c)); }
  constexpr bool contains(LogicalChannel c) const { return (mask_ & bit(c)) != 0; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::uint16_t mask() const { return mask_; }
  std::vector<LogicalChannel> members() const;
  constexpr bool operator==(const ChannelSet&) const = default;

  static constexpr std::uint16_t kFullMask = (1u << kLogicalChannelCount) - 1;

 private:
  static constexpr std::uint16_t bit(LogicalChannel c) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(c));
  }
  std::uint16_t mask_ = 0;
};

ChannelGroup group_of(LogicalChannel channel);

/// Which base-station roles may carry the channel.
RoleSet allowed_roles(LogicalChannel channel);

RoleSet functionality_roles(Functionality f);

/// The logical channel a functionality is carried on.
LogicalChannel functionality_channel(Functionality f);

struct ChannelValidation {
  std::vector<LogicalChannel> violations;  // in enumeration order, no repeats
  bool ok() const { return violations.empty(); }
};

ChannelValidation validate_bs_channels(Role role, ChannelSet channels);

/// True iff the set is one of the whitelisted physical-channel combinations:
/// TCH+SACCH, TCH+SACCH+FACCH, FCCH+SCH+BCCH+CCCH, SDCCH+SACCH.
bool is_permitted_combination(ChannelSet channels);

/// The whitelist itself, in a fixed order.
const std::array<ChannelSet, 4>& permitted_combinations();

/// Default channel complement for each role.
ChannelSet default_channels(Role role);

// ---------------------------------------------------------------------------
// TDMA timing. All times are integer microseconds.

using Micros = std::int64_t;

inline constexpr Micros kSlotDurationUs = 577;
inline constexpr int kSlotsPerFrame = 8;
inline constexpr Micros kFrameDurationUs = kSlotDurationUs * kSlotsPerFrame;

struct FrameTime {
  std::uint64_t frame_number = 0;
  int slot = 0;
};

Micros slot_start_time(FrameTime t);

// ---------------------------------------------------------------------------
// Carrier plan

struct CarrierConfig {
  std::uint16_t arfcn = 0;
  int color_code = 0;
  Role role = Role::SBS;
};

enum class CarrierViolation : std::uint8_t { ARFCN_COLLISION, COLOR_CODE_MISMATCH };

std::string_view to_string(CarrierViolation v);

struct CarrierValidation {
  std::vector<CarrierViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Raised when the inputs to validate_carrier_pair have the wrong roles.
class RoleMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

CarrierValidation validate_carrier_pair(const CarrierConfig& sbs, const CarrierConfig& dbs);

}  // namespace hcn
