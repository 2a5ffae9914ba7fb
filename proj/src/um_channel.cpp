#include "hcn/um_channel.hpp"

namespace hcn {

namespace {

constexpr std::array<std::string_view, kLogicalChannelCount> kChannelNames = {
    "FCCH", "SCH", "BCCH", "PCH", "NCH", "RACH", "AGCH", "SDCCH", "SACCH", "FACCH", "TCH"};

constexpr ChannelSet kBcchCombination = {
    LogicalChannel::FCCH, LogicalChannel::SCH,  LogicalChannel::BCCH, LogicalChannel::PCH,
    LogicalChannel::NCH,  LogicalChannel::RACH, LogicalChannel::AGCH};

const std::array<ChannelSet, 4> kPermitted = {
    ChannelSet{LogicalChannel::TCH, LogicalChannel::SACCH},
    ChannelSet{LogicalChannel::TCH, LogicalChannel::SACCH, LogicalChannel::FACCH},
    kBcchCombination,
    ChannelSet{LogicalChannel::SDCCH, LogicalChannel::SACCH},
};

}  // namespace

std::string_view to_string(LogicalChannel ch) { return kChannelNames[static_cast<std::size_t>(ch)]; }

std::string_view to_string(ChannelGroup g) {
  switch (g) {
    case ChannelGroup::BCH: return "BCH";
    case ChannelGroup::CCCH: return "CCCH";
    case ChannelGroup::DCCH: return "DCCH";
    case ChannelGroup::TCH_GROUP: return "TCH";
  }
  return "?";
}

std::string_view to_string(Role r) { return r == Role::SBS ? "SBS" : "DBS"; }

std::string_view to_string(Functionality f) {
  switch (f) {
    case Functionality::SYNCHRONIZATION: return "SYNCHRONIZATION";
    case Functionality::BROADCASTING: return "BROADCASTING";
    case Functionality::PAGING: return "PAGING";
    case Functionality::DATA_TRAFFIC: return "DATA_TRAFFIC";
  }
  return "?";
}

std::optional<LogicalChannel> parse_logical_channel(std::string_view name) {
  for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
    if (kChannelNames[i] == name) return static_cast<LogicalChannel>(i);
  }
  return std::nullopt;
}

std::vector<LogicalChannel> ChannelSet::members() const {
  std::vector<LogicalChannel> out;
  for (LogicalChannel c : kAllLogicalChannels) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

ChannelGroup group_of(LogicalChannel channel) {
  switch (channel) {
    case LogicalChannel::FCCH:
    case LogicalChannel::SCH:
    case LogicalChannel::BCCH:
      return ChannelGroup::BCH;
    case LogicalChannel::PCH:
    case LogicalChannel::NCH:
    case LogicalChannel::RACH:
    case LogicalChannel::AGCH:
      return ChannelGroup::CCCH;
    case LogicalChannel::SDCCH:
    case LogicalChannel::SACCH:
    case LogicalChannel::FACCH:
      return ChannelGroup::DCCH;
    case LogicalChannel::TCH:
      return ChannelGroup::TCH_GROUP;
  }
  throw std::logic_error("unknown logical channel");
}

RoleSet allowed_roles(LogicalChannel channel) {
  switch (group_of(channel)) {
    case ChannelGroup::BCH:
    case ChannelGroup::CCCH:
      return {Role::SBS};
    case ChannelGroup::TCH_GROUP:
      return {Role::DBS};
    case ChannelGroup::DCCH:
      // SACCH and FACCH ride with the traffic channel; SDCCH stays on both.
      if (channel == LogicalChannel::SDCCH) return {Role::SBS, Role::DBS};
      return {Role::DBS};
  }
  throw std::logic_error("unknown channel group");
}

RoleSet functionality_roles(Functionality f) {
  if (f == Functionality::DATA_TRAFFIC) return {Role::DBS};
  return {Role::SBS};
}

LogicalChannel functionality_channel(Functionality f) {
  switch (f) {
    case Functionality::SYNCHRONIZATION: return LogicalChannel::SCH;
    case Functionality::BROADCASTING: return LogicalChannel::BCCH;
    case Functionality::PAGING: return LogicalChannel::PCH;
    case Functionality::DATA_TRAFFIC: return LogicalChannel::TCH;
  }
  throw std::logic_error("unknown functionality");
}

ChannelValidation validate_bs_channels(Role role, ChannelSet channels) {
  ChannelValidation result;
  for (LogicalChannel c : channels.members()) {
    if (!allowed_roles(c).contains(role)) result.violations.push_back(c);
  }
  return result;
}

bool is_permitted_combination(ChannelSet channels) {
  for (const ChannelSet& combo : kPermitted) {
    if (combo == channels) return true;
  }
  return false;
}

const std::array<ChannelSet, 4>& permitted_combinations() { return kPermitted; }

ChannelSet default_channels(Role role) {
  if (role == Role::SBS) {
    ChannelSet s = kBcchCombination;
    s.insert(LogicalChannel::SDCCH);
    return s;
  }
  return {LogicalChannel::TCH, LogicalChannel::SACCH, LogicalChannel::FACCH, LogicalChannel::SDCCH};
}

Micros slot_start_time(FrameTime t) {
  if (t.slot < 0 || t.slot >= kSlotsPerFrame) {
    throw std::out_of_range("slot " + std::to_string(t.slot) + " outside [0,7]");
  }
  return (static_cast<Micros>(t.frame_number) * kSlotsPerFrame + t.slot) * kSlotDurationUs;
}

std::string_view to_string(CarrierViolation v) {
  return v == CarrierViolation::ARFCN_COLLISION ? "ARFCN_COLLISION" : "COLOR_CODE_MISMATCH";
}

CarrierValidation validate_carrier_pair(const CarrierConfig& sbs, const CarrierConfig& dbs) {
  if (sbs.role != Role::SBS || dbs.role != Role::DBS) {
    throw RoleMismatch("validate_carrier_pair expects (SBS, DBS) carriers");
  }
  CarrierValidation result;
  if (sbs.arfcn == dbs.arfcn) result.violations.push_back(CarrierViolation::ARFCN_COLLISION);
  if (sbs.color_code != dbs.color_code) result.violations.push_back(CarrierViolation::COLOR_CODE_MISMATCH);
  return result;
}

}  // namespace hcn
