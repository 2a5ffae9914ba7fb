#include "hcn/energy.hpp"

#include <stdexcept>
#include <string>

namespace hcn {

double PowerModel::watts(PowerState s) const {
  switch (s) {
    case PowerState::SLEEP: return sleep_w;
    case PowerState::WAKING: return waking_w;
    case PowerState::ACTIVE: return active_w;
  }
  return 0.0;
}

Micros& StateTimes::operator[](PowerState s) {
  switch (s) {
    case PowerState::SLEEP: return sleep_us;
    case PowerState::WAKING: return waking_us;
    case PowerState::ACTIVE: return active_us;
  }
  throw std::logic_error("unknown power state");
}

void EnergyLedger::open(std::uint16_t dbs_id, PowerState initial, Micros at) {
  if (open_.contains(dbs_id)) throw std::logic_error("DBS " + std::to_string(dbs_id) + " already in ledger");
  times_[dbs_id];
  open_[dbs_id] = Open{initial, at};
}

void EnergyLedger::transition(std::uint16_t dbs_id, PowerState next, Micros at) {
  auto it = open_.find(dbs_id);
  if (it == open_.end()) throw std::logic_error("DBS " + std::to_string(dbs_id) + " not in ledger");
  if (at < it->second.since) throw std::logic_error("ledger transition goes back in time");
  times_[dbs_id][it->second.state] += at - it->second.since;
  it->second = Open{next, at};
}

void EnergyLedger::close(Micros end) {
  for (auto& [id, o] : open_) {
    if (end < o.since) throw std::logic_error("ledger closed before its last transition");
    times_[id][o.state] += end - o.since;
    o.since = end;
  }
  closed_ = true;
}

EnergyReport energy_report(const std::map<std::uint16_t, StateTimes>& times, const PowerModel& model) {
  EnergyReport report;
  for (const auto& [id, t] : times) {
    DbsEnergy e{id, t, 0.0};
    e.joules = (model.sleep_w * static_cast<double>(t.sleep_us) + model.waking_w * static_cast<double>(t.waking_us) +
                model.active_w * static_cast<double>(t.active_us)) /
               1e6;
    report.total_joules += e.joules;
    report.per_dbs.push_back(e);
  }
  return report;
}

EnergyReport energy_report(const EnergyLedger& ledger) {
  if (!ledger.closed()) throw std::logic_error("energy report requested before the run was closed");
  return energy_report(ledger.times(), ledger.model());
}

}  // namespace hcn
