// A standard GSM handset as seen over the air: it camps on whatever carrier
// broadcasts BCH, asks for channels on RACH and follows assignments. It has
// no notion of signaling/data base stations.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "hcn/outbox.hpp"

namespace hcn {

enum class MsPhase : std::uint8_t { OFF, SCANNING, CAMPED, REQUESTING, ASSIGNED, IN_CALL };

std::string_view to_string(MsPhase p);

struct ServingDbs {
  std::uint16_t dbs_id = 0;
  std::uint16_t arfcn = 0;
  std::uint8_t slot = 0;
  bool operator==(const ServingDbs&) const = default;
};

struct VisibleCarrier {
  EntityId station;
  CarrierConfig carrier;
  bool broadcasting_bch = false;
};

class MobileStation {
 public:
  static constexpr Micros kDefaultHold = 1'000'000;

  /// `seed` drives the RACH random reference only.
  MobileStation(std::uint32_t ms_id, std::uint64_t seed);

  std::uint32_t id() const { return ms_id_; }
  EntityId entity() const { return EntityId::ms(ms_id_); }
  MsPhase phase() const { return phase_; }
  std::optional<std::uint16_t> camped_arfcn() const { return camped_arfcn_; }
  std::optional<EntityId> camped_station() const { return camped_station_; }
  const std::optional<ServingDbs>& serving_dbs() const { return serving_; }
  std::optional<ServiceKind> request_kind() const { return request_kind_; }

  void power_on_scan(std::span<const VisibleCarrier> carriers, Micros now, Outbox& out);
  void originate(ServiceKind kind, Micros hold, Micros now, Outbox& out);
  /// Hold time for the next answered mobile-terminated call.
  void script_answer(Micros hold) { mt_hold_ = hold; }
  void end_call(Micros now, Outbox& out);

  void on_air(EntityId from, const AirMessage& msg, Micros now, Outbox& out);
  void on_timer(TimerKind kind, std::uint64_t token, Micros now, Outbox& out);

 private:
  void request_channel(ServiceKind kind, Micros now, Outbox& out);
  void handle_assignment(EntityId from, const air::Assignment& a, Micros now, Outbox& out);
  void handle_paging(const air::Paging& page, Micros now, Outbox& out);

  std::uint32_t ms_id_;
  std::mt19937 rng_;
  MsPhase phase_ = MsPhase::OFF;
  std::optional<std::uint16_t> camped_arfcn_;
  std::optional<EntityId> camped_station_;
  std::optional<EntityId> pending_station_;
  std::optional<std::uint16_t> pending_arfcn_;
  std::optional<ServingDbs> serving_;
  std::optional<ServiceKind> request_kind_;
  Micros hold_ = kDefaultHold;
  Micros mt_hold_ = kDefaultHold;
  std::uint64_t call_generation_ = 0;
};

}  // namespace hcn
