#include "hcn/conformance.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "hcn/simulator.hpp"

namespace hcn {
namespace {

struct Transition {
  Verb on;
  int to;
};

struct Automaton {
  std::vector<std::vector<Transition>> states;
  int accept;
};

const Automaton& automaton(CallTemplate t) {
  using V = Verb;
  // Both templates share the tail starting at CHANNEL_REQUEST.
  static const Automaton mo{{
                                {{V::CHANNEL_REQUEST, 1}},
                                {{V::WAKEUP, 2}, {V::APPOINTMENT, 4}},
                                {{V::WAKEUP_ACK, 3}},
                                {{V::APPOINTMENT, 4}},
                                {{V::APPOINTMENT_RESPONSE, 5}},
                                {{V::ASSIGNMENT, 6}},
                                {{V::LINK_ESTABLISH, 7}},
                                {{V::TRAFFIC, 8}},
                                {},
                            },
                            8};
  static const Automaton mt{{
                                {{V::PAGE, 1}},
                                {{V::PAGE, 1}, {V::CHANNEL_REQUEST, 2}},
                                {{V::WAKEUP, 3}, {V::APPOINTMENT, 5}},
                                {{V::WAKEUP_ACK, 4}},
                                {{V::APPOINTMENT, 5}},
                                {{V::APPOINTMENT_RESPONSE, 6}},
                                {{V::ASSIGNMENT, 7}},
                                {{V::PAGING_ACK, 8}},
                                {{V::LINK_ESTABLISH, 9}},
                                {{V::TRAFFIC, 10}},
                                {},
                            },
                            10};
  return t == CallTemplate::MO ? mo : mt;
}

std::string describe(const TraceRecord& r) {
  return "t=" + std::to_string(r.time) + " " + to_string(r.actor) + " " + std::string(to_string(r.verb)) + " " +
         to_string(r.subject);
}

std::optional<std::uint32_t> mobile_of(const TraceRecord& r, const std::map<std::uint64_t, std::uint32_t>& txn_ms) {
  if (r.actor.kind == EntityKind::MS) return r.actor.id;
  if (r.subject.kind == EntityKind::MS) return r.subject.id;
  if (auto ms = r.attr_u64("ms")) return static_cast<std::uint32_t>(*ms);
  if (auto txn = r.attr_u64("txn")) {
    if (auto it = txn_ms.find(*txn); it != txn_ms.end()) return it->second;
  }
  return std::nullopt;
}

/// The station side of a record: the actor when it is a station, else the subject.
std::optional<Role> station_role(const TraceRecord& r) {
  if (auto role = role_of(r.actor)) return role;
  return role_of(r.subject);
}

}  // namespace

std::optional<CallTemplate> parse_template(std::string_view name) {
  if (name == "mo" || name == "MO") return CallTemplate::MO;
  if (name == "mt" || name == "MT") return CallTemplate::MT;
  return std::nullopt;
}

std::string_view to_string(CallTemplate t) { return t == CallTemplate::MO ? "mo" : "mt"; }

bool is_template_verb(Verb v) {
  switch (v) {
    case Verb::PAGE:
    case Verb::CHANNEL_REQUEST:
    case Verb::WAKEUP:
    case Verb::WAKEUP_ACK:
    case Verb::APPOINTMENT:
    case Verb::APPOINTMENT_RESPONSE:
    case Verb::ASSIGNMENT:
    case Verb::PAGING_ACK:
    case Verb::LINK_ESTABLISH:
    case Verb::TRAFFIC:
    case Verb::REJECT:
      return true;
    default:
      return false;
  }
}

TemplateMatch match_template(std::span<const Verb> verbs, CallTemplate t) {
  const Automaton& a = automaton(t);
  int state = 0;
  std::string prev = "START";
  for (Verb v : verbs) {
    const auto& edges = a.states[static_cast<std::size_t>(state)];
    auto it = std::find_if(edges.begin(), edges.end(), [v](const Transition& e) { return e.on == v; });
    if (it == edges.end()) return {false, prev + " -> " + std::string(to_string(v))};
    state = it->to;
    prev = std::string(to_string(v));
  }
  if (state != a.accept) return {false, prev + " -> END"};
  return {true, {}};
}

std::vector<CallSegment> segment_calls(std::span<const TraceRecord> trace) {
  std::map<std::uint64_t, std::uint32_t> txn_ms;
  std::vector<CallSegment> calls;
  std::map<std::uint32_t, std::size_t> open;  // ms -> index into calls

  auto paging_only = [&](const CallSegment& c) {
    return std::all_of(c.verbs.begin(), c.verbs.end(), [](Verb v) { return v == Verb::PAGE; });
  };
  auto start = [&](std::uint32_t ms, CallTemplate kind) -> CallSegment& {
    open[ms] = calls.size();
    calls.push_back(CallSegment{ms, kind, {}, {}});
    return calls.back();
  };

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    auto txn = r.attr_u64("txn");
    auto ms = mobile_of(r, txn_ms);
    if (txn && ms) txn_ms.emplace(*txn, *ms);
    if (!is_template_verb(r.verb) || !ms) continue;

    auto cur = open.find(*ms);
    CallSegment* seg = cur == open.end() ? nullptr : &calls[cur->second];
    if (r.verb == Verb::PAGE) {
      if (!seg || seg->kind != CallTemplate::MT || !paging_only(*seg)) seg = &start(*ms, CallTemplate::MT);
    } else if (r.verb == Verb::CHANNEL_REQUEST) {
      const std::string* kind = r.attr("kind");
      bool answers_page = seg && seg->kind == CallTemplate::MT && paging_only(*seg) && !seg->verbs.empty();
      if (!answers_page || (kind && *kind == "MO"))
        seg = &start(*ms, kind && *kind == "MT" ? CallTemplate::MT : CallTemplate::MO);
    } else if (!seg) {
      // Stray event with no call open; keep it so the check reports it.
      seg = &start(*ms, r.verb == Verb::PAGING_ACK ? CallTemplate::MT : CallTemplate::MO);
    }
    seg->records.push_back(i);
    seg->verbs.push_back(r.verb);
  }
  return calls;
}

CheckReport check_template(std::span<const TraceRecord> trace, CallTemplate t) {
  CheckReport report;
  for (const CallSegment& call : segment_calls(trace)) {
    if (call.kind != t) continue;
    ++report.calls_checked;
    TemplateMatch m = match_template(call.verbs, t);
    if (!m.ok) {
      const TraceRecord& first = trace[call.records.front()];
      report.failures.push_back("ms:" + std::to_string(call.ms_id) + " call at t=" + std::to_string(first.time) +
                                ": violated edge " + m.edge);
    }
  }
  if (report.calls_checked == 0)
    report.failures.push_back("no " + std::string(to_string(t)) + " call found in trace");
  report.pass = report.failures.empty();
  return report;
}

std::vector<std::string> placement_violations(std::span<const TraceRecord> trace) {
  std::vector<std::string> out;
  for (const TraceRecord& r : trace) {
    switch (r.verb) {
      case Verb::PAGE:
      case Verb::BROADCAST:
        if (r.actor.kind != EntityKind::SBS) out.push_back("functionality: " + describe(r) + " not from SBS");
        break;
      case Verb::LINK_ESTABLISH:
      case Verb::TRAFFIC:
        if (r.actor.kind != EntityKind::DBS) out.push_back("functionality: " + describe(r) + " not from DBS");
        break;
      default:
        break;
    }
    if (r.attr("channel")) {
      auto ch = r.channel();
      auto role = station_role(r);
      if (!ch)
        out.push_back("channel: " + describe(r) + " has unknown channel " + *r.attr("channel"));
      else if (!role)
        out.push_back("channel: " + describe(r) + " has no base-station party");
      else if (!allowed_roles(*ch).contains(*role))
        out.push_back("channel: " + describe(r) + " puts " + std::string(to_string(*ch)) + " on " +
                      std::string(to_string(*role)));
    }
  }
  return out;
}

std::vector<std::string> causality_violations(std::span<const TraceRecord> trace) {
  std::vector<std::string> out;
  std::set<std::pair<std::uint64_t, Verb>> seen;
  std::set<std::uint64_t> accepted, woken;
  std::map<std::uint64_t, std::pair<std::uint32_t, bool>> mt_assignment;  // txn -> (ms, paging acked)
  std::map<std::uint32_t, std::uint64_t> ms_last_assignment;

  for (const TraceRecord& r : trace) {
    if (r.verb == Verb::WAKEUP)
      if (auto txn = r.attr_u64("txn")) woken.insert(*txn);
  }

  auto need = [&](const TraceRecord& r, std::uint64_t txn, Verb cause) {
    if (!seen.contains({txn, cause}))
      out.push_back(describe(r) + " txn=" + std::to_string(txn) + " precedes its " + std::string(to_string(cause)));
  };

  for (const TraceRecord& r : trace) {
    if (r.verb == Verb::PAGING_ACK && r.actor.kind == EntityKind::MS) {
      if (auto it = ms_last_assignment.find(r.actor.id); it != ms_last_assignment.end()) {
        if (auto mt = mt_assignment.find(it->second); mt != mt_assignment.end()) mt->second.second = true;
      }
      continue;
    }
    auto txn = r.attr_u64("txn");
    if (!txn) continue;
    switch (r.verb) {
      case Verb::APPOINTMENT:
        if (woken.contains(*txn)) need(r, *txn, Verb::WAKEUP_ACK);
        break;
      case Verb::WAKEUP_ACK: need(r, *txn, Verb::WAKEUP); break;
      case Verb::APPOINTMENT_RESPONSE: need(r, *txn, Verb::APPOINTMENT); break;
      case Verb::ASSIGNMENT:
        if (!accepted.contains(*txn)) out.push_back(describe(r) + " txn=" + std::to_string(*txn) + " has no accepted APPOINTMENT_RESPONSE");
        if (r.subject.kind == EntityKind::MS) {
          ms_last_assignment[r.subject.id] = *txn;
          const std::string* kind = r.attr("kind");
          if (kind && *kind == "MT") mt_assignment[*txn] = {r.subject.id, false};
        }
        break;
      case Verb::LINK_ESTABLISH:
        need(r, *txn, Verb::ASSIGNMENT);
        if (auto mt = mt_assignment.find(*txn); mt != mt_assignment.end() && !mt->second.second)
          out.push_back(describe(r) + " txn=" + std::to_string(*txn) + " precedes its PAGING_ACK");
        break;
      case Verb::TRAFFIC: need(r, *txn, Verb::LINK_ESTABLISH); break;
      default: break;
    }
    if (r.verb == Verb::APPOINTMENT_RESPONSE && r.attr_u64("accept") == 1u) accepted.insert(*txn);
    seen.insert({*txn, r.verb});
  }
  return out;
}

std::vector<std::string> addressing_violations(std::span<const TraceRecord> trace) {
  std::vector<std::string> out;
  std::map<std::uint32_t, std::set<std::uint64_t>> assigned;  // ms -> dbs ids named so far
  for (const TraceRecord& r : trace) {
    if (r.verb == Verb::ASSIGNMENT && r.subject.kind == EntityKind::MS) {
      if (auto dbs = r.attr_u64("dbs")) assigned[r.subject.id].insert(*dbs);
      continue;
    }
    if (r.actor.kind == EntityKind::MS && r.subject.kind == EntityKind::DBS &&
        !assigned[r.actor.id].contains(r.subject.id))
      out.push_back(describe(r) + " before any assignment naming " + to_string(r.subject));
  }
  return out;
}

std::vector<std::string> state_violations(const Simulator& sim) {
  std::vector<std::string> out;
  std::uint64_t links = 0, in_call = 0;
  for (const auto& [id, d] : sim.data_stations()) {
    links += d.established_links();
    double load = d.load();
    if (load < 0.0 || load > 1.0) out.push_back("dbs:" + std::to_string(id) + " load out of range");
    if (d.power_state() == PowerState::SLEEP && d.busy_slots() != 0)
      out.push_back("dbs:" + std::to_string(id) + " asleep with busy slots");
  }
  for (const auto& [id, m] : sim.mobiles())
    if (m.phase() == MsPhase::IN_CALL) ++in_call;
  if (links != in_call)
    out.push_back("t=" + std::to_string(sim.now()) + " established links " + std::to_string(links) +
                  " != in-call mobiles " + std::to_string(in_call));
  return out;
}

std::map<std::string, std::vector<std::string>> pair_sequences(std::span<const TraceRecord> trace) {
  std::map<std::string, std::vector<std::string>> out;
  for (const TraceRecord& r : trace) {
    auto [lo, hi] = std::minmax(r.actor, r.subject);
    out[to_string(lo) + "|" + to_string(hi)].push_back(std::string(to_string(r.verb)) + " " + to_string(r.actor) +
                                                       " " + to_string(r.subject));
  }
  return out;
}

}  // namespace hcn
