// Entities and the abstract air-interface messages exchanged between mobiles
// and base stations.
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "hcn/protocol.hpp"
#include "hcn/um_channel.hpp"

namespace hcn {

enum class EntityKind : std::uint8_t { SBS, DBS, MS };

struct EntityId {
  EntityKind kind = EntityKind::MS;
  std::uint32_t id = 0;

  static constexpr EntityId sbs(std::uint32_t id) { return {EntityKind::SBS, id}; }
  static constexpr EntityId dbs(std::uint32_t id) { return {EntityKind::DBS, id}; }
  static constexpr EntityId ms(std::uint32_t id) { return {EntityKind::MS, id}; }

  bool is_station() const { return kind != EntityKind::MS; }
  auto operator<=>(const EntityId&) const = default;
};

/// "sbs:1", "dbs:2", "ms:100".
std::string to_string(EntityId e);
std::optional<EntityId> parse_entity(std::string_view text);

std::optional<Role> role_of(EntityId e);

enum class RejectReason : std::uint8_t { NO_DBS_AVAILABLE };

std::string_view to_string(RejectReason r);

namespace air {

struct RegisterRequest {
  std::uint32_t ms_id = 0;
  bool operator==(const RegisterRequest&) const = default;
};
struct RegisterResult {
  bool accepted = false;
  bool operator==(const RegisterResult&) const = default;
};
struct ChannelRequest {
  std::uint32_t ms_id = 0;
  ServiceKind kind = ServiceKind::MO_CALL;
  std::uint8_t random_ref = 0;
  bool operator==(const ChannelRequest&) const = default;
};
struct Assignment {
  std::uint16_t dbs_id = 0;
  std::uint16_t arfcn = 0;
  std::uint8_t slot = 0;
  ServiceKind kind = ServiceKind::MO_CALL;
  bool operator==(const Assignment&) const = default;
};
struct AssignmentReject {
  RejectReason reason = RejectReason::NO_DBS_AVAILABLE;
  bool operator==(const AssignmentReject&) const = default;
};
struct Paging {
  std::uint32_t ms_id = 0;
  bool operator==(const Paging&) const = default;
};
struct PagingAck {
  std::uint32_t ms_id = 0;
  bool operator==(const PagingAck&) const = default;
};
struct LinkRequest {
  std::uint32_t ms_id = 0;
  bool operator==(const LinkRequest&) const = default;
};
struct LinkConfirm {
  std::uint8_t slot = 0;
  bool operator==(const LinkConfirm&) const = default;
};
struct LinkTeardown {
  std::uint32_t ms_id = 0;
  bool operator==(const LinkTeardown&) const = default;
};

}  // namespace air

using AirMessage = std::variant<air::RegisterRequest, air::RegisterResult, air::ChannelRequest, air::Assignment,
                                air::AssignmentReject, air::Paging, air::PagingAck, air::LinkRequest,
                                air::LinkConfirm, air::LinkTeardown>;

/// Single-token text form used to relay air messages between processes,
/// e.g. "ASSIGN,2,60,0,1".
std::string to_text(const AirMessage& msg);
std::optional<AirMessage> air_from_text(std::string_view text);

}  // namespace hcn
