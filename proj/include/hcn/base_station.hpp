// Signaling and data base-station state machines.
//
// The SBS owns camping admission, paging and DBS selection. A DBS stays
// silent until appointed, serves traffic links and sleeps when idle.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "hcn/outbox.hpp"

namespace hcn {

/// A data base station as mirrored at the SBS.
struct DbsDescriptor {
  std::uint16_t dbs_id = 0;
  PowerState power_state = PowerState::SLEEP;
  std::uint32_t occupied = 0;  // busy traffic slots
  std::uint32_t capacity = 7;
  CarrierConfig carrier{0, 0, Role::DBS};

  double load() const { return capacity == 0 ? 1.0 : static_cast<double>(occupied) / capacity; }
};

using DbsRegistry = std::map<std::uint16_t, DbsDescriptor>;

struct AppointmentDecision {
  enum class Kind : std::uint8_t { APPOINT, WAKE_THEN_APPOINT, REJECT };

  Kind kind = Kind::REJECT;
  std::uint16_t dbs_id = 0;  // unused for REJECT
  RejectReason reason = RejectReason::NO_DBS_AVAILABLE;

  static AppointmentDecision appoint(std::uint16_t id) { return {Kind::APPOINT, id, {}}; }
  static AppointmentDecision wake(std::uint16_t id) { return {Kind::WAKE_THEN_APPOINT, id, {}}; }
  static AppointmentDecision reject() { return {Kind::REJECT, 0, RejectReason::NO_DBS_AVAILABLE}; }
  bool operator==(const AppointmentDecision&) const = default;
};

/// Picks the serving DBS:
///  1. the least-loaded ACTIVE DBS below `threshold` (and not full);
///  2. otherwise wake the lowest-id sleeper;
///  3. otherwise the least-loaded ACTIVE DBS that still has a free slot;
///  4. otherwise reject.
/// Loads are compared after wire quantization, ties by lowest id. WAKING
/// stations and ids in `excluded` are never chosen.
AppointmentDecision select_dbs(const DbsRegistry& registry, double threshold,
                               std::span<const std::uint16_t> excluded = {});

// ---------------------------------------------------------------------------

struct SbsConfig {
  std::uint16_t id = 1;
  CarrierConfig carrier{50, 0, Role::SBS};
  bool allowlist_mode = false;
  std::set<std::uint32_t> allowlist;
  double high_load_threshold = 0.8;
};

struct PendingTransaction {
  enum class Stage : std::uint8_t { AWAIT_WAKE, AWAIT_RESPONSE };

  std::uint32_t ms_id = 0;
  ServiceKind kind = ServiceKind::MO_CALL;
  std::uint16_t dbs_id = 0;
  Stage stage = Stage::AWAIT_RESPONSE;
  int attempt = 1;
};

class SignalingStation {
 public:
  SignalingStation(SbsConfig config, std::vector<DbsDescriptor> registry);

  EntityId entity() const { return EntityId::sbs(config_.id); }
  const SbsConfig& config() const { return config_; }
  const DbsRegistry& registry() const { return registry_; }
  const std::map<std::uint32_t, PendingTransaction>& pending() const { return pending_; }
  const std::set<std::uint32_t>& registered() const { return registered_; }

  /// Admission decision; accepted identities become registered.
  bool handle_registration(std::uint32_t ms_id);

  void broadcast_system_info(std::uint32_t ms_id, Micros now, Outbox& out) const;
  void page(std::uint32_t ms_id, Micros now, Outbox& out);
  void on_air(EntityId from, const AirMessage& msg, Micros now, Outbox& out);
  void on_control(std::uint16_t from, const ControlMessage& msg, Micros now, Outbox& out);

 private:
  void handle_channel_request(std::uint32_t ms_id, ServiceKind kind, Micros now, Outbox& out);
  void handle_appointment_response(std::uint16_t from, std::uint32_t txn, const AppointmentResponse& resp,
                                   Micros now, Outbox& out);
  void handle_wakeup_ack(std::uint16_t from, std::uint32_t txn, Micros now, Outbox& out);
  void handle_status(std::uint16_t from, const StatusReport& report);
  void dispatch(std::uint32_t txn, PendingTransaction txn_state, std::span<const std::uint16_t> excluded,
                Micros now, Outbox& out);
  void send_appointment(std::uint32_t txn, const PendingTransaction& p, Micros now, Outbox& out);
  void reject(std::uint32_t ms_id, Micros now, Outbox& out);

  SbsConfig config_;
  DbsRegistry registry_;
  std::set<std::uint32_t> registered_;
  std::map<std::uint32_t, PendingTransaction> pending_;
  std::uint32_t next_txn_ = 1;
};

// ---------------------------------------------------------------------------

struct DbsConfig {
  std::uint16_t id = 2;
  std::uint16_t sbs_id = 1;
  CarrierConfig carrier{60, 0, Role::DBS};
  std::uint32_t capacity = 7;
  PowerState initial_power = PowerState::ACTIVE;
  Micros wake_latency = 100'000;
  Micros idle_timeout = 5'000'000;
};

struct DbsLink {
  std::uint8_t slot = 0;
  ServiceKind kind = ServiceKind::MO_CALL;
  std::uint32_t transaction_id = 0;
  bool paging_acked = false;
  bool established = false;
};

class DataStation {
 public:
  explicit DataStation(DbsConfig config);

  EntityId entity() const { return EntityId::dbs(config_.id); }
  const DbsConfig& config() const { return config_; }
  PowerState power_state() const { return power_; }
  const std::map<std::uint32_t, DbsLink>& links() const { return links_; }
  /// Reserved plus established links.
  std::uint32_t busy_slots() const { return static_cast<std::uint32_t>(links_.size()); }
  /// Links with an established traffic channel.
  std::uint32_t established_links() const;
  double load() const { return static_cast<double>(busy_slots()) / config_.capacity; }

  /// Scripted fault injection: the next appointment is denied.
  void deny_next_appointment() { deny_next_ = true; }

  /// Accepts iff ACTIVE with a free slot; reserves the requested slot when
  /// free, else the lowest free one.
  AppointmentResponse handle_appointment(const ChannelAppointment& appt, std::uint32_t txn, Micros now,
                                         Outbox& out);
  void handle_wakeup(std::uint32_t txn, Micros now, Outbox& out);
  /// Drops the link for `ms_id` and frees its slot.
  bool release(std::uint32_t ms_id, Micros now, Outbox& out);

  void on_control(std::uint16_t from, const ControlMessage& msg, Micros now, Outbox& out);
  void on_air(EntityId from, const AirMessage& msg, Micros now, Outbox& out);
  void on_timer(TimerKind kind, std::uint64_t token, Micros now, Outbox& out);

 private:
  void arm_idle_timer(Outbox& out);
  void send_status(Micros now, Outbox& out);
  std::uint8_t pick_slot(std::uint8_t requested) const;

  DbsConfig config_;
  PowerState power_;
  std::map<std::uint32_t, DbsLink> links_;
  std::vector<std::uint32_t> pending_wake_acks_;
  std::uint64_t idle_generation_ = 0;
  std::uint64_t wake_generation_ = 0;
  bool deny_next_ = false;
};

}  // namespace hcn
