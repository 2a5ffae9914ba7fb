#include "hcn/mobile_station.hpp"

namespace hcn {

std::string_view to_string(MsPhase p) {
  switch (p) {
    case MsPhase::OFF: return "OFF";
    case MsPhase::SCANNING: return "SCANNING";
    case MsPhase::CAMPED: return "CAMPED";
    case MsPhase::REQUESTING: return "REQUESTING";
    case MsPhase::ASSIGNED: return "ASSIGNED";
    case MsPhase::IN_CALL: return "IN_CALL";
  }
  return "?";
}

namespace {

std::mt19937 seeded(std::uint32_t ms_id, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), ms_id};
  return std::mt19937(seq);
}

}  // namespace

MobileStation::MobileStation(std::uint32_t ms_id, std::uint64_t seed) : ms_id_(ms_id), rng_(seeded(ms_id, seed)) {}

void MobileStation::power_on_scan(std::span<const VisibleCarrier> carriers, Micros now, Outbox& out) {
  if (phase_ != MsPhase::OFF) {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, entity()).with("reason", "power_on_while_on");
    return;
  }
  phase_ = MsPhase::SCANNING;
  for (const VisibleCarrier& c : carriers) {
    if (!c.broadcasting_bch) continue;
    pending_station_ = c.station;
    pending_arfcn_ = c.carrier.arfcn;
    out.record(now, entity(), Verb::REGISTER, c.station)
        .with("channel", LogicalChannel::SDCCH)
        .with("arfcn", c.carrier.arfcn);
    out.air.push_back(AirSend{c.station, air::RegisterRequest{ms_id_}});
    return;
  }
}

void MobileStation::originate(ServiceKind kind, Micros hold, Micros now, Outbox& out) {
  if (phase_ != MsPhase::CAMPED) {
    const bool busy = phase_ == MsPhase::REQUESTING || phase_ == MsPhase::ASSIGNED || phase_ == MsPhase::IN_CALL;
    out.record(now, entity(), busy ? Verb::REQUEST_PENDING : Verb::NOT_CAMPED, camped_station_.value_or(entity()))
        .with("phase", std::string(to_string(phase_)));
    return;
  }
  hold_ = hold;
  request_channel(kind, now, out);
}

void MobileStation::request_channel(ServiceKind kind, Micros now, Outbox& out) {
  phase_ = MsPhase::REQUESTING;
  request_kind_ = kind;
  const auto ref = static_cast<std::uint8_t>(rng_() & 0xFFu);
  out.record(now, entity(), Verb::CHANNEL_REQUEST, *camped_station_)
      .with("channel", LogicalChannel::RACH)
      .with("kind", std::string(to_string(kind)))
      .with("ref", ref);
  out.air.push_back(AirSend{*camped_station_, air::ChannelRequest{ms_id_, kind, ref}});
}

void MobileStation::end_call(Micros now, Outbox& out) {
  if (phase_ != MsPhase::IN_CALL) {
    out.record(now, entity(), Verb::NOT_IN_CALL, entity()).with("phase", std::string(to_string(phase_)));
    return;
  }
  const EntityId dbs = EntityId::dbs(serving_->dbs_id);
  out.record(now, entity(), Verb::RELEASE, dbs).with("channel", LogicalChannel::FACCH);
  out.air.push_back(AirSend{dbs, air::LinkTeardown{ms_id_}});
  phase_ = MsPhase::CAMPED;
  serving_.reset();
  request_kind_.reset();
  ++call_generation_;
}

void MobileStation::on_air(EntityId from, const AirMessage& msg, Micros now, Outbox& out) {
  if (phase_ == MsPhase::OFF) return;

  if (const auto* res = std::get_if<air::RegisterResult>(&msg)) {
    if (phase_ != MsPhase::SCANNING || pending_station_ != from) return;
    if (res->accepted) {
      phase_ = MsPhase::CAMPED;
      camped_station_ = from;
      camped_arfcn_ = pending_arfcn_;
    }
    pending_station_.reset();
    pending_arfcn_.reset();
  } else if (const auto* page = std::get_if<air::Paging>(&msg)) {
    handle_paging(*page, now, out);
  } else if (const auto* a = std::get_if<air::Assignment>(&msg)) {
    handle_assignment(from, *a, now, out);
  } else if (std::holds_alternative<air::AssignmentReject>(msg)) {
    if (phase_ != MsPhase::REQUESTING) {
      out.record(now, entity(), Verb::ORPHAN_ASSIGNMENT, from).with("reason", "reject_while_not_requesting");
      return;
    }
    phase_ = MsPhase::CAMPED;
    request_kind_.reset();
  } else if (std::holds_alternative<air::LinkConfirm>(msg)) {
    if (phase_ != MsPhase::ASSIGNED || !serving_ || from != EntityId::dbs(serving_->dbs_id)) {
      out.record(now, entity(), Verb::PROTOCOL_VIOLATION, from).with("reason", "unexpected_link_confirm");
      return;
    }
    phase_ = MsPhase::IN_CALL;
    out.timers.push_back(TimerRequest{hold_, TimerKind::CALL_END, ++call_generation_});
  } else {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, from).with("reason", "unexpected_air_message");
  }
}

void MobileStation::handle_paging(const air::Paging& page, Micros now, Outbox& out) {
  if (page.ms_id != ms_id_ || phase_ != MsPhase::CAMPED) return;
  hold_ = mt_hold_;
  request_channel(ServiceKind::MT_CALL, now, out);
}

void MobileStation::handle_assignment(EntityId from, const air::Assignment& a, Micros now, Outbox& out) {
  if (phase_ != MsPhase::REQUESTING || request_kind_ != a.kind) {
    out.record(now, entity(), Verb::ORPHAN_ASSIGNMENT, from).with("phase", std::string(to_string(phase_)));
    return;
  }
  serving_ = ServingDbs{a.dbs_id, a.arfcn, a.slot};
  phase_ = MsPhase::ASSIGNED;
  const EntityId dbs = EntityId::dbs(a.dbs_id);
  out.record(now, entity(), Verb::RETUNE, dbs).with("arfcn", a.arfcn).with("slot", a.slot);
  if (a.kind == ServiceKind::MT_CALL) {
    out.record(now, entity(), Verb::PAGING_ACK, dbs).with("channel", LogicalChannel::FACCH);
    out.air.push_back(AirSend{dbs, air::PagingAck{ms_id_}});
  }
  out.air.push_back(AirSend{dbs, air::LinkRequest{ms_id_}});
}

void MobileStation::on_timer(TimerKind kind, std::uint64_t token, Micros now, Outbox& out) {
  if (kind == TimerKind::CALL_END && token == call_generation_ && phase_ == MsPhase::IN_CALL) end_call(now, out);
}

}  // namespace hcn
