#include "hcn/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hcn {

namespace {

struct Line {
  std::size_t number;
  std::string keyword;
  std::map<std::string, std::string> fields;
};

[[noreturn]] void fail(std::size_t line, const std::string& why) {
  throw ScenarioError("scenario line " + std::to_string(line) + ": " + why);
}

template <typename T>
T parse_int(const std::string& s, std::size_t line, const std::string& what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) fail(line, "bad " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, std::size_t line, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(line, "bad " + what + " '" + s + "'");
  }
  if (used != s.size()) fail(line, "bad " + what + " '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Line tokenize(const std::string& text, std::size_t number, bool keyword_first) {
  Line line{number, {}, {}};
  std::istringstream in(text);
  std::string tok;
  bool first = true;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (first && keyword_first && eq == std::string::npos) {
      line.keyword = tok;
    } else if (eq == std::string::npos || eq == 0) {
      fail(number, "expected key=value, found '" + tok + "'");
    } else {
      const std::string key = tok.substr(0, eq);
      if (!line.fields.emplace(key, tok.substr(eq + 1)).second) fail(number, "duplicate key '" + key + "'");
    }
    first = false;
  }
  return line;
}

const std::string* take(Line& l, const std::string& key) {
  auto it = l.fields.find(key);
  return it == l.fields.end() ? nullptr : &it->second;
}

const std::string& require(Line& l, const std::string& key) {
  const std::string* v = take(l, key);
  if (!v) fail(l.number, "missing '" + key + "='");
  return *v;
}

void reject_unknown(const Line& l, std::initializer_list<std::string_view> known) {
  for (const auto& [k, v] : l.fields) {
    if (std::find(known.begin(), known.end(), k) == known.end()) fail(l.number, "unknown key '" + k + "'");
  }
}

std::optional<StimulusKind> parse_stimulus_kind(std::string_view s) {
  for (StimulusKind k : {StimulusKind::POWER_ON, StimulusKind::MO_CALL, StimulusKind::MT_CALL, StimulusKind::END_CALL,
                         StimulusKind::DENY_NEXT_APPOINTMENT}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

StationSpec parse_station(Line& l) {
  StationSpec st;
  if (l.keyword == "sbs") {
    st.role = Role::SBS;
    reject_unknown(l, {"id", "arfcn", "color", "channels"});
  } else if (l.keyword == "dbs") {
    st.role = Role::DBS;
    reject_unknown(l, {"id", "arfcn", "color", "channels", "capacity", "power"});
  } else {
    fail(l.number, "expected 'sbs' or 'dbs', found '" + l.keyword + "'");
  }
  st.id = parse_int<std::uint16_t>(require(l, "id"), l.number, "id");
  st.carrier.arfcn = parse_int<std::uint16_t>(require(l, "arfcn"), l.number, "arfcn");
  st.carrier.color_code = parse_int<int>(require(l, "color"), l.number, "color code");
  st.carrier.role = st.role;
  if (const std::string* chans = take(l, "channels")) {
    for (const std::string& name : split_list(*chans)) {
      auto ch = parse_logical_channel(name);
      if (!ch) fail(l.number, "unknown logical channel '" + name + "'");
      st.channels.insert(*ch);
    }
  } else {
    st.channels = default_channels(st.role);
  }
  if (st.role == Role::DBS) {
    if (const std::string* cap = take(l, "capacity")) st.capacity = parse_int<std::uint32_t>(*cap, l.number, "capacity");
    if (const std::string* p = take(l, "power")) {
      if (*p == "ACTIVE") {
        st.initial_power = PowerState::ACTIVE;
      } else if (*p == "SLEEP") {
        st.initial_power = PowerState::SLEEP;
      } else {
        fail(l.number, "power must be ACTIVE or SLEEP");
      }
    }
  }
  return st;
}

void apply_knob(Knobs& k, const std::string& key, const std::string& value, std::size_t line) {
  auto us = [&](const char* what) { return parse_int<Micros>(value, line, what); };
  if (key == "seed") {
    k.seed = parse_int<std::uint64_t>(value, line, "seed");
  } else if (key == "high_load_threshold") {
    k.high_load_threshold = parse_double(value, line, "threshold");
  } else if (key == "wake_latency_us") {
    k.wake_latency = us("wake latency");
  } else if (key == "idle_timeout_us") {
    k.idle_timeout = us("idle timeout");
  } else if (key == "control_delay_us") {
    k.control_delay = us("control delay");
  } else if (key == "air_delay_us") {
    k.air_delay = us("air delay");
  } else if (key == "horizon_us") {
    k.horizon = us("horizon");
  } else if (key == "power_sleep_w") {
    k.power.sleep_w = parse_double(value, line, "power");
  } else if (key == "power_waking_w") {
    k.power.waking_w = parse_double(value, line, "power");
  } else if (key == "power_active_w") {
    k.power.active_w = parse_double(value, line, "power");
  } else if (key == "allowlist") {
    k.allowlist_mode = true;
    for (const std::string& id : split_list(value)) k.allowlist.push_back(parse_int<std::uint32_t>(id, line, "ms id"));
  } else {
    fail(line, "unknown knob '" + key + "'");
  }
}

}  // namespace

std::string_view to_string(StimulusKind k) {
  switch (k) {
    case StimulusKind::POWER_ON: return "POWER_ON";
    case StimulusKind::MO_CALL: return "MO_CALL";
    case StimulusKind::MT_CALL: return "MT_CALL";
    case StimulusKind::END_CALL: return "END_CALL";
    case StimulusKind::DENY_NEXT_APPOINTMENT: return "DENY_NEXT_APPOINTMENT";
  }
  return "?";
}

const StationSpec* Scenario::sbs() const {
  for (const StationSpec& s : stations) {
    if (s.role == Role::SBS) return &s;
  }
  return nullptr;
}

std::vector<const StationSpec*> Scenario::dbs_stations() const {
  std::vector<const StationSpec*> out;
  for (const StationSpec& s : stations) {
    if (s.role == Role::DBS) out.push_back(&s);
  }
  return out;
}

const StationSpec* Scenario::station(std::uint16_t id) const {
  for (const StationSpec& s : stations) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

bool Scenario::has_mobile(std::uint32_t id) const {
  return std::any_of(mobiles.begin(), mobiles.end(), [id](const MobileSpec& m) { return m.id == id; });
}

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string section;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = raw.find_last_not_of(" \t\r");
    std::string text = raw.substr(first, last - first + 1);

    if (text.front() == '[') {
      if (text.back() != ']') fail(number, "unterminated section header");
      section = text.substr(1, text.size() - 2);
      if (section != "stations" && section != "mobiles" && section != "stimuli" && section != "knobs") {
        fail(number, "unknown section [" + section + "]");
      }
      continue;
    }

    if (section == "stations") {
      Line l = tokenize(text, number, true);
      sc.stations.push_back(parse_station(l));
    } else if (section == "mobiles") {
      Line l = tokenize(text, number, true);
      if (l.keyword != "ms") fail(number, "expected 'ms'");
      reject_unknown(l, {"id"});
      sc.mobiles.push_back(MobileSpec{parse_int<std::uint32_t>(require(l, "id"), number, "ms id")});
    } else if (section == "stimuli") {
      std::istringstream ts(text);
      std::string time_tok;
      std::string action_tok;
      ts >> time_tok >> action_tok;
      if (action_tok.empty()) fail(number, "stimulus needs '<time> <ACTION>'");
      std::string rest;
      std::getline(ts, rest);
      Line l = tokenize(rest, number, false);
      Stimulus s;
      s.time = parse_int<Micros>(time_tok, number, "stimulus time");
      auto kind = parse_stimulus_kind(action_tok);
      if (!kind) fail(number, "unknown action '" + action_tok + "'");
      s.kind = *kind;
      if (s.kind == StimulusKind::DENY_NEXT_APPOINTMENT) {
        reject_unknown(l, {"dbs"});
        s.target = parse_int<std::uint32_t>(require(l, "dbs"), number, "dbs id");
      } else if (s.kind == StimulusKind::MO_CALL || s.kind == StimulusKind::MT_CALL) {
        reject_unknown(l, {"ms", "duration"});
        s.target = parse_int<std::uint32_t>(require(l, "ms"), number, "ms id");
        s.duration = parse_int<Micros>(require(l, "duration"), number, "duration");
      } else {
        reject_unknown(l, {"ms"});
        s.target = parse_int<std::uint32_t>(require(l, "ms"), number, "ms id");
      }
      sc.stimuli.push_back(s);
    } else if (section == "knobs") {
      Line l = tokenize(text, number, false);
      for (const auto& [k, v] : l.fields) apply_knob(sc.knobs, k, v, number);
    } else {
      fail(number, "content outside any section");
    }
  }
  return sc;
}

Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[stations]\n";
  for (const StationSpec& st : s.stations) {
    out << (st.role == Role::SBS ? "sbs" : "dbs") << " id=" << st.id << " arfcn=" << st.carrier.arfcn
        << " color=" << st.carrier.color_code;
    if (st.role == Role::DBS) {
      out << " capacity=" << st.capacity << " power=" << to_string(st.initial_power);
    }
    if (st.channels != default_channels(st.role)) {
      out << " channels=";
      bool first = true;
      for (LogicalChannel c : st.channels.members()) {
        out << (first ? "" : ",") << to_string(c);
        first = false;
      }
    }
    out << '\n';
  }
  out << "[mobiles]\n";
  for (const MobileSpec& m : s.mobiles) out << "ms id=" << m.id << '\n';
  out << "[stimuli]\n";
  for (const Stimulus& st : s.stimuli) {
    out << st.time << ' ' << to_string(st.kind);
    if (st.kind == StimulusKind::DENY_NEXT_APPOINTMENT) {
      out << " dbs=" << st.target;
    } else {
      out << " ms=" << st.target;
    }
    if (st.kind == StimulusKind::MO_CALL || st.kind == StimulusKind::MT_CALL) out << " duration=" << st.duration;
    out << '\n';
  }
  const Knobs& k = s.knobs;
  out << "[knobs]\n";
  out << "seed=" << k.seed << '\n';
  out.precision(17);
  out << "high_load_threshold=" << k.high_load_threshold << '\n';
  out << "wake_latency_us=" << k.wake_latency << '\n';
  out << "idle_timeout_us=" << k.idle_timeout << '\n';
  out << "control_delay_us=" << k.control_delay << '\n';
  out << "air_delay_us=" << k.air_delay << '\n';
  if (k.horizon) out << "horizon_us=" << *k.horizon << '\n';
  out << "power_sleep_w=" << k.power.sleep_w << '\n';
  out << "power_waking_w=" << k.power.waking_w << '\n';
  out << "power_active_w=" << k.power.active_w << '\n';
  if (k.allowlist_mode) {
    out << "allowlist=";
    for (std::size_t i = 0; i < k.allowlist.size(); ++i) out << (i ? "," : "") << k.allowlist[i];
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> problems;
  auto problem = [&problems](std::string p) { problems.push_back(std::move(p)); };

  std::size_t sbs_count = 0;
  std::set<std::uint16_t> ids;
  std::set<std::uint16_t> arfcns;
  for (const StationSpec& st : s.stations) {
    const std::string name = std::string(st.role == Role::SBS ? "sbs:" : "dbs:") + std::to_string(st.id);
    if (st.role == Role::SBS) ++sbs_count;
    if (!ids.insert(st.id).second) problem("duplicate station id " + std::to_string(st.id));
    if (!arfcns.insert(st.carrier.arfcn).second) problem("ARFCN " + std::to_string(st.carrier.arfcn) + " used twice");
    if (st.carrier.color_code < 0 || st.carrier.color_code > 7) problem(name + ": color code outside 0-7");
    const ChannelValidation cv = validate_bs_channels(st.role, st.channels);
    for (LogicalChannel c : cv.violations) {
      problem(name + ": channel " + std::string(to_string(c)) + " not allowed on " + std::string(to_string(st.role)));
    }
    if (st.role == Role::SBS && !st.channels.contains(LogicalChannel::BCCH)) problem(name + ": SBS must carry BCCH");
    if (st.role == Role::DBS) {
      if (st.capacity == 0 || st.capacity > 64) problem(name + ": capacity must be in 1-64");
      if (!st.channels.contains(LogicalChannel::TCH)) problem(name + ": DBS must carry TCH");
    }
  }
  if (sbs_count != 1) problem("exactly one SBS required, found " + std::to_string(sbs_count));
  if (const StationSpec* sbs = s.sbs(); sbs && sbs_count == 1) {
    for (const StationSpec* dbs : s.dbs_stations()) {
      const CarrierValidation v = validate_carrier_pair(sbs->carrier, dbs->carrier);
      for (CarrierViolation cv : v.violations) {
        problem("sbs:" + std::to_string(sbs->id) + "/dbs:" + std::to_string(dbs->id) + ": " +
                std::string(to_string(cv)));
      }
    }
  }

  std::set<std::uint32_t> ms_ids;
  for (const MobileSpec& m : s.mobiles) {
    if (!ms_ids.insert(m.id).second) problem("duplicate ms id " + std::to_string(m.id));
  }

  Micros prev = 0;
  for (std::size_t i = 0; i < s.stimuli.size(); ++i) {
    const Stimulus& st = s.stimuli[i];
    const std::string where = "stimulus " + std::to_string(i + 1) + " (" + std::string(to_string(st.kind)) + ")";
    if (st.time < prev) problem(where + ": stimuli not sorted by time");
    if (st.time < 0) problem(where + ": negative time");
    prev = std::max(prev, st.time);
    if (st.kind == StimulusKind::DENY_NEXT_APPOINTMENT) {
      const StationSpec* target = st.target <= 0xFFFF ? s.station(static_cast<std::uint16_t>(st.target)) : nullptr;
      if (!target || target->role != Role::DBS) problem(where + ": unknown dbs " + std::to_string(st.target));
    } else if (!ms_ids.contains(st.target)) {
      problem(where + ": unknown ms " + std::to_string(st.target));
    }
    if ((st.kind == StimulusKind::MO_CALL || st.kind == StimulusKind::MT_CALL) && st.duration <= 0) {
      problem(where + ": call duration must be positive");
    }
  }

  const Knobs& k = s.knobs;
  if (!(k.high_load_threshold >= 0.0 && k.high_load_threshold <= 1.0)) problem("high_load_threshold outside [0,1]");
  if (k.wake_latency < 0 || k.idle_timeout <= 0) problem("wake latency must be >= 0 and idle timeout > 0");
  if (k.control_delay < 0 || k.air_delay < 0) problem("delays must be non-negative");
  if (k.horizon && *k.horizon < 0) problem("horizon must be non-negative");
  if (k.power.sleep_w < 0 || k.power.waking_w < 0 || k.power.active_w < 0) problem("state powers must be >= 0");
  return problems;
}

}  // namespace hcn
