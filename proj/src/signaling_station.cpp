#include <algorithm>
#include <cmath>

#include "hcn/base_station.hpp"

namespace hcn {

SignalingStation::SignalingStation(SbsConfig config, std::vector<DbsDescriptor> registry)
    : config_(std::move(config)) {
  for (DbsDescriptor& d : registry) registry_.emplace(d.dbs_id, d);
}

bool SignalingStation::handle_registration(std::uint32_t ms_id) {
  if (config_.allowlist_mode && !config_.allowlist.contains(ms_id)) return false;
  registered_.insert(ms_id);
  return true;
}

void SignalingStation::broadcast_system_info(std::uint32_t ms_id, Micros now, Outbox& out) const {
  out.record(now, entity(), Verb::BROADCAST, EntityId::ms(ms_id))
      .with("channel", LogicalChannel::BCCH)
      .with("arfcn", config_.carrier.arfcn)
      .with("color", static_cast<std::uint64_t>(config_.carrier.color_code));
}

void SignalingStation::page(std::uint32_t ms_id, Micros now, Outbox& out) {
  if (!registered_.contains(ms_id)) {
    out.record(now, entity(), Verb::PAGE_UNKNOWN_MS, EntityId::ms(ms_id));
    return;
  }
  out.record(now, entity(), Verb::PAGE, EntityId::ms(ms_id)).with("channel", LogicalChannel::PCH);
  out.air.push_back(AirSend{EntityId::ms(ms_id), air::Paging{ms_id}, true});
}

void SignalingStation::on_air(EntityId from, const AirMessage& msg, Micros now, Outbox& out) {
  if (const auto* reg = std::get_if<air::RegisterRequest>(&msg)) {
    const bool accepted = handle_registration(reg->ms_id);
    out.record(now, entity(), Verb::REGISTER_ACK, EntityId::ms(reg->ms_id))
        .with("channel", LogicalChannel::SDCCH)
        .with("result", accepted ? "accept" : "reject");
    out.air.push_back(AirSend{EntityId::ms(reg->ms_id), air::RegisterResult{accepted}});
  } else if (const auto* req = std::get_if<air::ChannelRequest>(&msg)) {
    handle_channel_request(req->ms_id, req->kind, now, out);
  } else {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, from).with("reason", "unexpected_air_message");
  }
}

void SignalingStation::on_control(std::uint16_t from, const ControlMessage& msg, Micros now, Outbox& out) {
  if (!registry_.contains(from)) {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, EntityId::dbs(from)).with("reason", "unknown_dbs");
    return;
  }
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AppointmentResponse>) {
          handle_appointment_response(from, msg.transaction_id, p, now, out);
        } else if constexpr (std::is_same_v<T, WakeupAck>) {
          handle_wakeup_ack(from, msg.transaction_id, now, out);
        } else if constexpr (std::is_same_v<T, StatusReport>) {
          handle_status(from, p);
        } else if constexpr (std::is_same_v<T, LinkRelease>) {
          // Load bookkeeping arrives with the STATUS_REPORT that follows.
        } else {
          out.record(now, entity(), Verb::PROTOCOL_VIOLATION, EntityId::dbs(from))
              .with("reason", "unexpected_control_message")
              .with("txn", msg.transaction_id);
        }
      },
      msg.payload);
}

void SignalingStation::handle_channel_request(std::uint32_t ms_id, ServiceKind kind, Micros now, Outbox& out) {
  if (!registered_.contains(ms_id)) {
    out.record(now, entity(), Verb::UNREGISTERED_REQUEST, EntityId::ms(ms_id));
    return;
  }
  PendingTransaction p;
  p.ms_id = ms_id;
  p.kind = kind;
  dispatch(next_txn_++, p, {}, now, out);
}

void SignalingStation::dispatch(std::uint32_t txn, PendingTransaction p, std::span<const std::uint16_t> excluded,
                                Micros now, Outbox& out) {
  const AppointmentDecision decision = select_dbs(registry_, config_.high_load_threshold, excluded);
  switch (decision.kind) {
    case AppointmentDecision::Kind::APPOINT:
      p.dbs_id = decision.dbs_id;
      p.stage = PendingTransaction::Stage::AWAIT_RESPONSE;
      pending_[txn] = p;
      send_appointment(txn, p, now, out);
      break;
    case AppointmentDecision::Kind::WAKE_THEN_APPOINT:
      p.dbs_id = decision.dbs_id;
      p.stage = PendingTransaction::Stage::AWAIT_WAKE;
      pending_[txn] = p;
      registry_.at(decision.dbs_id).power_state = PowerState::WAKING;
      out.record(now, entity(), Verb::WAKEUP, EntityId::dbs(decision.dbs_id))
          .with("txn", txn)
          .with("ms", p.ms_id);
      out.control.push_back(ControlSend{decision.dbs_id, ControlMessage{txn, WakeupCommand{decision.dbs_id}}});
      break;
    case AppointmentDecision::Kind::REJECT:
      reject(p.ms_id, now, out);
      break;
  }
}

void SignalingStation::send_appointment(std::uint32_t txn, const PendingTransaction& p, Micros now, Outbox& out) {
  out.record(now, entity(), Verb::APPOINTMENT, EntityId::dbs(p.dbs_id))
      .with("txn", txn)
      .with("ms", p.ms_id)
      .with("kind", std::string(to_string(p.kind)));
  out.control.push_back(ControlSend{p.dbs_id, ControlMessage{txn, ChannelAppointment{p.ms_id, p.kind, kAnySlot}}});
}

void SignalingStation::reject(std::uint32_t ms_id, Micros now, Outbox& out) {
  out.record(now, entity(), Verb::REJECT, EntityId::ms(ms_id))
      .with("channel", LogicalChannel::AGCH)
      .with("reason", std::string(to_string(RejectReason::NO_DBS_AVAILABLE)));
  out.air.push_back(AirSend{EntityId::ms(ms_id), air::AssignmentReject{RejectReason::NO_DBS_AVAILABLE}});
}

void SignalingStation::handle_appointment_response(std::uint16_t from, std::uint32_t txn,
                                                   const AppointmentResponse& resp, Micros now, Outbox& out) {
  const auto it = pending_.find(txn);
  if (it == pending_.end() || it->second.stage != PendingTransaction::Stage::AWAIT_RESPONSE ||
      it->second.dbs_id != from) {
    out.record(now, entity(), Verb::ORPHAN_RESPONSE, EntityId::dbs(from)).with("txn", txn);
    return;
  }
  PendingTransaction p = it->second;
  pending_.erase(it);

  if (resp.accept) {
    DbsDescriptor& d = registry_.at(from);
    d.power_state = PowerState::ACTIVE;
    d.occupied = std::min(d.occupied + 1, d.capacity);
    out.record(now, entity(), Verb::ASSIGNMENT, EntityId::ms(p.ms_id))
        .with("channel", LogicalChannel::AGCH)
        .with("txn", txn)
        .with("dbs", from)
        .with("arfcn", resp.arfcn)
        .with("slot", resp.slot)
        .with("kind", std::string(to_string(p.kind)));
    out.air.push_back(AirSend{EntityId::ms(p.ms_id), air::Assignment{from, resp.arfcn, resp.slot, p.kind}});
    return;
  }

  if (p.attempt >= 2) {
    reject(p.ms_id, now, out);
    return;
  }
  p.attempt += 1;
  const std::uint16_t excluded[] = {from};
  dispatch(next_txn_++, p, excluded, now, out);
}

void SignalingStation::handle_wakeup_ack(std::uint16_t from, std::uint32_t txn, Micros now, Outbox& out) {
  registry_.at(from).power_state = PowerState::ACTIVE;
  const auto it = pending_.find(txn);
  if (it == pending_.end() || it->second.stage != PendingTransaction::Stage::AWAIT_WAKE ||
      it->second.dbs_id != from) {
    out.record(now, entity(), Verb::ORPHAN_RESPONSE, EntityId::dbs(from)).with("txn", txn);
    return;
  }
  it->second.stage = PendingTransaction::Stage::AWAIT_RESPONSE;
  send_appointment(txn, it->second, now, out);
}

void SignalingStation::handle_status(std::uint16_t from, const StatusReport& report) {
  DbsDescriptor& d = registry_.at(from);
  // A sleeping DBS stays silent, so a SLEEP report never overtakes our own wake command.
  if (!(d.power_state == PowerState::WAKING && report.power() == PowerState::SLEEP)) {
    d.power_state = report.power();
  }
  const auto occupied = static_cast<std::uint32_t>(std::lround(report.load_byte() * d.capacity / 255.0));
  d.occupied = std::min(occupied, d.capacity);
}

}  // namespace hcn
