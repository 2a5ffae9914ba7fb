#include "hcn/base_station.hpp"

namespace hcn {

DataStation::DataStation(DbsConfig config) : config_(config), power_(config.initial_power) {
  if (config_.capacity == 0 || config_.capacity >= kAnySlot) {
    throw std::invalid_argument("DBS capacity must be in [1, 254]");
  }
  if (power_ == PowerState::WAKING) throw std::invalid_argument("DBS cannot start in WAKING");
}

std::uint32_t DataStation::established_links() const {
  std::uint32_t n = 0;
  for (const auto& [ms, link] : links_) n += link.established ? 1 : 0;
  return n;
}

std::uint8_t DataStation::pick_slot(std::uint8_t requested) const {
  std::vector<bool> used(config_.capacity, false);
  for (const auto& [ms, link] : links_) used[link.slot] = true;
  if (requested < config_.capacity && !used[requested]) return requested;
  for (std::uint32_t s = 0; s < config_.capacity; ++s) {
    if (!used[s]) return static_cast<std::uint8_t>(s);
  }
  throw std::logic_error("pick_slot called on a full DBS");
}

AppointmentResponse DataStation::handle_appointment(const ChannelAppointment& appt, std::uint32_t txn, Micros now,
                                                    Outbox& out) {
  AppointmentResponse resp{false, config_.carrier.arfcn, 0};
  const EntityId sbs = EntityId::sbs(config_.sbs_id);

  if (power_ != PowerState::ACTIVE) {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, sbs)
        .with("reason", power_ == PowerState::SLEEP ? "appointment_while_sleep" : "appointment_while_waking")
        .with("txn", txn);
  } else if (links_.contains(appt.ms_id)) {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, sbs).with("reason", "duplicate_link").with("txn", txn);
  } else if (deny_next_) {
    deny_next_ = false;
  } else if (busy_slots() < config_.capacity) {
    resp.accept = true;
    resp.slot = pick_slot(appt.slot);
    links_[appt.ms_id] = DbsLink{resp.slot, appt.service, txn, false, false};
    ++idle_generation_;  // cancels a pending idle sleep
  }

  auto& rec = out.record(now, entity(), Verb::APPOINTMENT_RESPONSE, sbs)
                  .with("txn", txn)
                  .with("ms", appt.ms_id)
                  .with("accept", resp.accept ? 1u : 0u);
  if (resp.accept) rec.with("arfcn", resp.arfcn).with("slot", resp.slot);
  out.control.push_back(ControlSend{config_.sbs_id, ControlMessage{txn, resp}});
  return resp;
}

void DataStation::handle_wakeup(std::uint32_t txn, Micros now, Outbox& out) {
  switch (power_) {
    case PowerState::ACTIVE:
      out.record(now, entity(), Verb::WAKEUP_ACK, EntityId::sbs(config_.sbs_id)).with("txn", txn);
      out.control.push_back(ControlSend{config_.sbs_id, ControlMessage{txn, WakeupAck{config_.id}}});
      break;
    case PowerState::SLEEP:
      power_ = PowerState::WAKING;
      out.power_changes.push_back(power_);
      pending_wake_acks_.push_back(txn);
      out.timers.push_back(TimerRequest{config_.wake_latency, TimerKind::WAKE_COMPLETE, ++wake_generation_});
      break;
    case PowerState::WAKING:
      pending_wake_acks_.push_back(txn);
      break;
  }
}

bool DataStation::release(std::uint32_t ms_id, Micros now, Outbox& out) {
  const auto it = links_.find(ms_id);
  if (it == links_.end()) {
    out.record(now, entity(), Verb::UNKNOWN_LINK, EntityId::ms(ms_id));
    return false;
  }
  const std::uint32_t txn = it->second.transaction_id;
  links_.erase(it);
  out.record(now, entity(), Verb::RELEASE, EntityId::sbs(config_.sbs_id)).with("txn", txn).with("ms", ms_id);
  out.control.push_back(ControlSend{config_.sbs_id, ControlMessage{txn, LinkRelease{ms_id}}});
  send_status(now, out);
  if (links_.empty()) arm_idle_timer(out);
  return true;
}

void DataStation::on_control(std::uint16_t from, const ControlMessage& msg, Micros now, Outbox& out) {
  if (from != config_.sbs_id) {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, EntityId::dbs(from)).with("reason", "control_from_non_sbs");
    return;
  }
  if (const auto* appt = std::get_if<ChannelAppointment>(&msg.payload)) {
    handle_appointment(*appt, msg.transaction_id, now, out);
  } else if (const auto* wake = std::get_if<WakeupCommand>(&msg.payload)) {
    if (wake->dbs_id != config_.id) {
      out.record(now, entity(), Verb::PROTOCOL_VIOLATION, EntityId::sbs(from))
          .with("reason", "wakeup_for_other_dbs")
          .with("txn", msg.transaction_id);
      return;
    }
    handle_wakeup(msg.transaction_id, now, out);
  } else {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, EntityId::sbs(from))
        .with("reason", "unexpected_control_message")
        .with("txn", msg.transaction_id);
  }
}

void DataStation::on_air(EntityId from, const AirMessage& msg, Micros now, Outbox& out) {
  auto violation = [&](std::string reason) {
    out.record(now, entity(), Verb::PROTOCOL_VIOLATION, from).with("reason", std::move(reason));
  };

  if (const auto* ack = std::get_if<air::PagingAck>(&msg)) {
    const auto it = links_.find(ack->ms_id);
    if (it == links_.end() || it->second.kind != ServiceKind::MT_CALL) {
      violation("paging_ack_without_mt_appointment");
      return;
    }
    it->second.paging_acked = true;
  } else if (const auto* req = std::get_if<air::LinkRequest>(&msg)) {
    const auto it = links_.find(req->ms_id);
    if (it == links_.end()) {
      violation("link_request_without_appointment");
      return;
    }
    DbsLink& link = it->second;
    if (link.established) {
      violation("link_already_established");
      return;
    }
    if (link.kind == ServiceKind::MT_CALL && !link.paging_acked) {
      violation("link_before_paging_ack");
      return;
    }
    link.established = true;
    const EntityId ms = EntityId::ms(req->ms_id);
    out.record(now, entity(), Verb::LINK_ESTABLISH, ms)
        .with("channel", LogicalChannel::TCH)
        .with("txn", link.transaction_id)
        .with("slot", link.slot);
    out.record(now, entity(), Verb::TRAFFIC, ms)
        .with("channel", LogicalChannel::TCH)
        .with("txn", link.transaction_id)
        .with("slot", link.slot);
    out.air.push_back(AirSend{ms, air::LinkConfirm{link.slot}});
  } else if (const auto* down = std::get_if<air::LinkTeardown>(&msg)) {
    release(down->ms_id, now, out);
  } else {
    violation("unexpected_air_message");
  }
}

void DataStation::on_timer(TimerKind kind, std::uint64_t token, Micros now, Outbox& out) {
  if (kind == TimerKind::WAKE_COMPLETE) {
    if (token != wake_generation_ || power_ != PowerState::WAKING) return;
    power_ = PowerState::ACTIVE;
    out.power_changes.push_back(power_);
    for (std::uint32_t txn : pending_wake_acks_) {
      out.record(now, entity(), Verb::WAKEUP_ACK, EntityId::sbs(config_.sbs_id)).with("txn", txn);
      out.control.push_back(ControlSend{config_.sbs_id, ControlMessage{txn, WakeupAck{config_.id}}});
    }
    pending_wake_acks_.clear();
    arm_idle_timer(out);
  } else if (kind == TimerKind::IDLE_CHECK) {
    if (token != idle_generation_ || power_ != PowerState::ACTIVE || !links_.empty()) return;
    power_ = PowerState::SLEEP;
    out.power_changes.push_back(power_);
    send_status(now, out);
  }
}

void DataStation::arm_idle_timer(Outbox& out) {
  out.timers.push_back(TimerRequest{config_.idle_timeout, TimerKind::IDLE_CHECK, ++idle_generation_});
}

void DataStation::send_status(Micros now, Outbox& out) {
  const StatusReport report(power_, load());
  out.record(now, entity(), Verb::STATUS, EntityId::sbs(config_.sbs_id))
      .with("power", std::string(to_string(power_)))
      .with("load", report.load_byte());
  out.control.push_back(ControlSend{config_.sbs_id, ControlMessage{0, report}});
}

}  // namespace hcn
