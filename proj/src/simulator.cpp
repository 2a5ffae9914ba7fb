#include "hcn/simulator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hcn {
namespace {

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string_view air_name(const AirMessage& msg) {
  static constexpr std::string_view names[] = {"register_request", "register_result", "channel_request",
                                               "assignment",       "assignment_reject", "paging",
                                               "paging_ack",       "link_request",     "link_confirm",
                                               "link_teardown"};
  return names[msg.index()];
}

}  // namespace

Simulator::Simulator(const Scenario& scenario, std::optional<std::set<EntityId>> hosted, RemoteLink* remote)
    : scenario_(scenario), remote_(remote), ledger_(scenario.knobs.power) {
  if (auto problems = validate_scenario(scenario_); !problems.empty()) throw ScenarioError(join(problems));

  const StationSpec& sbs_spec = *scenario_.sbs();
  for (const auto& st : scenario_.stations) {
    EntityId e = st.role == Role::SBS ? EntityId::sbs(st.id) : EntityId::dbs(st.id);
    known_.insert(e);
    carriers_.push_back(VisibleCarrier{e, st.carrier, st.channels.contains(LogicalChannel::BCCH)});
  }
  for (const auto& m : scenario_.mobiles) known_.insert(EntityId::ms(m.id));
  hosted_ = hosted ? *hosted : known_;

  const Knobs& k = scenario_.knobs;
  if (hosts(EntityId::sbs(sbs_spec.id))) {
    SbsConfig cfg;
    cfg.id = sbs_spec.id;
    cfg.carrier = sbs_spec.carrier;
    cfg.allowlist_mode = k.allowlist_mode;
    cfg.allowlist.insert(k.allowlist.begin(), k.allowlist.end());
    cfg.high_load_threshold = k.high_load_threshold;
    std::vector<DbsDescriptor> registry;
    for (const auto* d : scenario_.dbs_stations())
      registry.push_back(DbsDescriptor{d->id, d->initial_power, 0, d->capacity, d->carrier});
    sbs_.emplace(cfg, std::move(registry));
    endpoints_.emplace(sbs_spec.id, ControlEndpoint(sbs_spec.id));
  }
  for (const auto* d : scenario_.dbs_stations()) {
    if (!hosts(EntityId::dbs(d->id))) continue;
    DbsConfig cfg{d->id, sbs_spec.id, d->carrier, d->capacity, d->initial_power, k.wake_latency, k.idle_timeout};
    dbs_.emplace(d->id, DataStation(cfg));
    endpoints_.emplace(d->id, ControlEndpoint(d->id));
    ledger_.open(d->id, d->initial_power, 0);
  }
  for (const auto& m : scenario_.mobiles)
    if (hosts(EntityId::ms(m.id))) ms_.emplace(m.id, MobileStation(m.id, k.seed));

  for (const auto& s : scenario_.stimuli) {
    EntityId target = s.kind == StimulusKind::DENY_NEXT_APPOINTMENT ? EntityId::dbs(s.target)
                      : s.kind == StimulusKind::MT_CALL         ? EntityId::sbs(sbs_spec.id)
                                                                 : EntityId::ms(s.target);
    if (hosts(target)) schedule(s.time, target, StimulusEvent{s});
  }
}

bool Simulator::hosts(EntityId e) const { return hosted_.contains(e); }

const DataStation* Simulator::dbs(std::uint16_t id) const {
  auto it = dbs_.find(id);
  return it == dbs_.end() ? nullptr : &it->second;
}

const MobileStation* Simulator::ms(std::uint32_t id) const {
  auto it = ms_.find(id);
  return it == ms_.end() ? nullptr : &it->second;
}

const ControlEndpoint* Simulator::endpoint(std::uint16_t station) const {
  auto it = endpoints_.find(station);
  return it == endpoints_.end() ? nullptr : &it->second;
}

bool Simulator::exists(EntityId e) const { return hosts(e) && !removed_.contains(e); }

void Simulator::remove_entity(EntityId e) { removed_.insert(e); }

void Simulator::schedule(Micros at, EntityId target, Payload payload) {
  if (at < now_) throw std::logic_error("event scheduled in the past");
  queue_.push(SimEvent{at, next_seq_++, target, std::move(payload)});
}

std::optional<Micros> Simulator::next_event_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().time;
}

void Simulator::run_instant(Micros t) {
  if (t < now_) throw std::logic_error("run_instant goes back in time");
  now_ = t;
  started_ = true;
  while (!queue_.empty() && queue_.top().time == t) {
    SimEvent ev = queue_.top();
    queue_.pop();
    dispatch(ev);
  }
}

void Simulator::finish(Micros end) {
  if (end < now_) end = now_;
  ledger_.close(end);
}

RunResult Simulator::run(const StepObserver& observer) {
  const auto& horizon = scenario_.knobs.horizon;
  while (auto t = next_event_time()) {
    if (horizon && *t > *horizon) break;
    run_instant(*t);
    if (observer) observer(*this, *t);
  }
  Micros end = horizon ? *horizon : now_;
  finish(end);
  return RunResult{trace_, energy_report(ledger_), end};
}

void Simulator::inject_control(std::uint16_t to, Bytes datagram, Micros at) {
  const StationSpec* st = scenario_.station(to);
  if (!st) throw std::invalid_argument("control datagram for unknown station " + std::to_string(to));
  EntityId target = st->role == Role::SBS ? EntityId::sbs(to) : EntityId::dbs(to);
  schedule(at, target, ControlEvent{std::move(datagram)});
}

void Simulator::inject_air(EntityId from, EntityId to, AirMessage msg, Micros at) {
  schedule(at, to, AirEvent{from, std::move(msg)});
}

void Simulator::deliver_air(EntityId from, EntityId to, AirMessage msg) {
  Micros at = now_ + scenario_.knobs.air_delay;
  if (!hosts(to) && known_.contains(to) && remote_) {
    remote_->send_air(from, to, msg, at);
    return;
  }
  schedule(at, to, AirEvent{from, std::move(msg)});
}

void Simulator::deliver_control(std::uint16_t from, std::uint16_t to, const ControlMessage& msg) {
  auto ep = endpoints_.find(from);
  if (ep == endpoints_.end()) throw std::logic_error("control send from a station not hosted here");
  const StationSpec* st = scenario_.station(to);
  EntityId target = !st ? EntityId::dbs(to) : st->role == Role::SBS ? EntityId::sbs(to) : EntityId::dbs(to);
  EntityId sender = ep->first == scenario_.sbs()->id ? EntityId::sbs(from) : EntityId::dbs(from);
  Bytes datagram = ep->second.frame(to, msg);
  if (!st) {
    dead_letter(sender, target, to_string(msg.kind()));
    return;
  }
  if (!hosts(target) && remote_) {
    remote_->send_control(from, to, datagram, now_);
    return;
  }
  schedule(now_ + scenario_.knobs.control_delay, target, ControlEvent{std::move(datagram)});
}

void Simulator::dead_letter(EntityId from, EntityId to, std::string_view what) {
  trace_.emplace_back(now_, from, Verb::DEAD_LETTER, to).with("message", std::string(what));
}

void Simulator::dispatch(const SimEvent& ev) {
  std::visit(Overload{
                 [&](const StimulusEvent& s) { handle_stimulus(s.stimulus); },
                 [&](const AirEvent& a) { handle_air(a.from, ev.target, a.msg); },
                 [&](const ControlEvent& c) { handle_control(static_cast<std::uint16_t>(ev.target.id), c.datagram); },
                 [&](const TimerEvent& t) { handle_timer(ev.target, t.kind, t.token); },
             },
             ev.payload);
}

void Simulator::handle_stimulus(const Stimulus& s) {
  Outbox out;
  switch (s.kind) {
    case StimulusKind::POWER_ON: {
      auto& m = ms_.at(s.target);
      if (sbs_ && exists(sbs_->entity())) {
        Outbox bcast;
        sbs_->broadcast_system_info(s.target, now_, bcast);
        apply(sbs_->entity(), bcast);
      }
      m.power_on_scan(carriers_, now_, out);
      apply(m.entity(), out);
      return;
    }
    case StimulusKind::MO_CALL: {
      auto& m = ms_.at(s.target);
      m.originate(ServiceKind::MO_CALL, s.duration, now_, out);
      apply(m.entity(), out);
      return;
    }
    case StimulusKind::MT_CALL: {
      if (auto it = ms_.find(s.target); it != ms_.end()) it->second.script_answer(s.duration);
      sbs_->page(s.target, now_, out);
      apply(sbs_->entity(), out);
      return;
    }
    case StimulusKind::END_CALL: {
      auto& m = ms_.at(s.target);
      m.end_call(now_, out);
      apply(m.entity(), out);
      return;
    }
    case StimulusKind::DENY_NEXT_APPOINTMENT:
      dbs_.at(static_cast<std::uint16_t>(s.target)).deny_next_appointment();
      return;
  }
}

void Simulator::handle_air(EntityId from, EntityId to, const AirMessage& msg) {
  if (!exists(to)) {
    dead_letter(from, to, air_name(msg));
    return;
  }
  Outbox out;
  switch (to.kind) {
    case EntityKind::SBS: sbs_->on_air(from, msg, now_, out); break;
    case EntityKind::DBS: dbs_.at(static_cast<std::uint16_t>(to.id)).on_air(from, msg, now_, out); break;
    case EntityKind::MS: ms_.at(to.id).on_air(from, msg, now_, out); break;
  }
  apply(to, out);
}

void Simulator::handle_control(std::uint16_t to, const Bytes& datagram) {
  bool is_sbs = sbs_ && sbs_->config().id == to;
  EntityId self = is_sbs ? EntityId::sbs(to) : EntityId::dbs(to);
  if (!exists(self)) {
    dead_letter(self, self, "control");
    return;
  }
  auto result = decode(datagram);
  if (const auto* err = std::get_if<DecodeError>(&result)) {
    trace_.emplace_back(now_, self, Verb::DROPPED_DATAGRAM, self).with("reason", std::string(to_string(err->kind)));
    return;
  }
  const auto& d = std::get<Decoded>(result);
  const StationSpec* peer = scenario_.station(d.header.sender_id);
  EntityId from = peer && peer->role == Role::SBS ? EntityId::sbs(d.header.sender_id)
                                                  : EntityId::dbs(d.header.sender_id);
  Delivery verdict = endpoints_.at(to).admit(d.header);
  if (verdict != Delivery::DELIVER) {
    trace_.emplace_back(now_, self, Verb::DROPPED_DATAGRAM, from)
        .with("reason", verdict == Delivery::DROP_DUPLICATE ? "duplicate" : "stale")
        .with("seq", std::uint64_t{d.header.seq});
    return;
  }
  Outbox out;
  if (is_sbs)
    sbs_->on_control(d.header.sender_id, d.message, now_, out);
  else
    dbs_.at(to).on_control(d.header.sender_id, d.message, now_, out);
  apply(self, out);
}

void Simulator::handle_timer(EntityId owner, TimerKind kind, std::uint64_t token) {
  if (!exists(owner)) return;
  Outbox out;
  if (owner.kind == EntityKind::DBS)
    dbs_.at(static_cast<std::uint16_t>(owner.id)).on_timer(kind, token, now_, out);
  else if (owner.kind == EntityKind::MS)
    ms_.at(owner.id).on_timer(kind, token, now_, out);
  apply(owner, out);
}

void Simulator::apply(EntityId owner, Outbox& out) {
  for (auto& r : out.trace) trace_.push_back(std::move(r));
  if (owner.kind == EntityKind::DBS)
    for (PowerState p : out.power_changes) ledger_.transition(static_cast<std::uint16_t>(owner.id), p, now_);
  for (const auto& t : out.timers) schedule(now_ + t.delay, owner, TimerEvent{t.kind, t.token});
  for (const auto& c : out.control) deliver_control(static_cast<std::uint16_t>(owner.id), c.to_station, c.message);
  for (auto& a : out.air) {
    if (!a.to_camped) {
      deliver_air(owner, a.to, a.message);
      continue;
    }
    // Camping is a property of the receiver; only locally hosted handsets can
    // be camped on a locally hosted station.
    for (const auto& [id, m] : ms_)
      if (m.camped_station() == owner && !removed_.contains(m.entity())) deliver_air(owner, m.entity(), a.message);
  }
}

RunResult run_scenario(const Scenario& scenario, const Simulator::StepObserver& observer) {
  Simulator sim(scenario);
  return sim.run(observer);
}

}  // namespace hcn
