#include "hcn/summary.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace hcn {

RunSummary summarize(const RunResult& result) {
  RunSummary s;
  for (const TraceRecord& r : result.trace) {
    switch (r.verb) {
      case Verb::CHANNEL_REQUEST: ++s.attempted; break;
      case Verb::LINK_ESTABLISH: ++s.connected; break;
      case Verb::REJECT: ++s.rejected; break;
      case Verb::WAKEUP: ++s.wakeups; break;
      default: break;
    }
  }
  s.end_time = result.end_time;
  s.energy = result.energy;
  return s;
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream out;
  out << std::left;
  auto row = [&](const char* label, auto value) { out << std::setw(18) << label << value << '\n'; };
  row("calls attempted", s.attempted);
  row("calls connected", s.connected);
  row("calls rejected", s.rejected);
  row("wake-ups", s.wakeups);
  row("run length (us)", s.end_time);
  out << '\n'
      << std::setw(8) << "dbs" << std::right << std::setw(14) << "sleep_us" << std::setw(14) << "waking_us"
      << std::setw(14) << "active_us" << std::setw(14) << "energy_J" << '\n';
  for (const DbsEnergy& d : s.energy.per_dbs) {
    out << std::left << std::setw(8) << ("dbs:" + std::to_string(d.dbs_id)) << std::right << std::setw(14)
        << d.times.sleep_us << std::setw(14) << d.times.waking_us << std::setw(14) << d.times.active_us
        << std::setw(14) << std::fixed << std::setprecision(3) << d.joules << '\n';
  }
  out << std::left << std::setw(50) << "total" << std::right << std::setw(14) << std::fixed << std::setprecision(3)
      << s.energy.total_joules << '\n';
  return out.str();
}

std::string format_summary_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["summary"] = true;
  j["attempted"] = s.attempted;
  j["connected"] = s.connected;
  j["rejected"] = s.rejected;
  j["wakeups"] = s.wakeups;
  j["end_us"] = s.end_time;
  auto per = nlohmann::ordered_json::array();
  for (const DbsEnergy& d : s.energy.per_dbs) {
    per.push_back({{"dbs", "dbs:" + std::to_string(d.dbs_id)},
                   {"sleep_us", d.times.sleep_us},
                   {"waking_us", d.times.waking_us},
                   {"active_us", d.times.active_us},
                   {"energy_j", d.joules}});
  }
  j["dbs"] = per;
  j["total_energy_j"] = s.energy.total_joules;
  return j.dump();
}

}  // namespace hcn
