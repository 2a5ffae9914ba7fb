// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hcn/conformance.hpp"
#include "hcn/protocol.hpp"
#include "hcn/simulator.hpp"
#include "hcn/split_run.hpp"
#include "hcn/um_channel.hpp"
#include "oracles.hpp"

using namespace hcn;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string scenario_path(const std::string& name) { return std::string(HCN_SCENARIO_DIR) + "/" + name; }

std::vector<const TraceRecord*> with_verb(const std::vector<TraceRecord>& trace, Verb v) {
  std::vector<const TraceRecord*> out;
  for (const auto& r : trace)
    if (r.verb == v) out.push_back(&r);
  return out;
}

std::vector<Verb> template_verbs(const std::vector<TraceRecord>& trace) {
  std::vector<Verb> out;
  for (const auto& r : trace)
    if (is_template_verb(r.verb)) out.push_back(r.verb);
  return out;
}

// Round-trips the trace through its file format, the same path `check` takes.
std::vector<TraceRecord> reread(const std::vector<TraceRecord>& trace) {
  std::stringstream ss;
  write_trace(ss, trace);
  return read_trace(ss);
}

void conformance(Outcome& o, const std::string& file, CallTemplate t, const std::vector<Verb>& order) {
  RunResult r = run_scenario(load_scenario(scenario_path(file)));
  auto trace = reread(r.trace);
  CheckReport rep = check_template(trace, t);
  o.expect(rep.pass, rep.failures.empty() ? "check failed" : rep.failures[0]);
  o.expect(rep.calls_checked == 1, "expected exactly one call");
  o.expect(template_verbs(trace) == order, "verb order differs from the template");
}

Outcome criterion1() {
  Outcome o;
  using V = Verb;
  conformance(o, "mo.hcn-scn", CallTemplate::MO,
              {V::CHANNEL_REQUEST, V::APPOINTMENT, V::APPOINTMENT_RESPONSE, V::ASSIGNMENT, V::LINK_ESTABLISH,
               V::TRAFFIC});
  return o;
}

Outcome criterion2() {
  Outcome o;
  using V = Verb;
  conformance(o, "mt.hcn-scn", CallTemplate::MT,
              {V::PAGE, V::CHANNEL_REQUEST, V::APPOINTMENT, V::APPOINTMENT_RESPONSE, V::ASSIGNMENT, V::PAGING_ACK,
               V::LINK_ESTABLISH, V::TRAFFIC});
  RunResult r = run_scenario(load_scenario(scenario_path("mt.hcn-scn")));
  auto ack = std::find_if(r.trace.begin(), r.trace.end(), [](auto& x) { return x.verb == Verb::PAGING_ACK; });
  auto link = std::find_if(r.trace.begin(), r.trace.end(), [](auto& x) { return x.verb == Verb::LINK_ESTABLISH; });
  o.expect(ack != r.trace.end() && link != r.trace.end() && ack < link, "PAGING_ACK not strictly before LINK_ESTABLISH");
  return o;
}

Outcome criterion3() {
  Outcome o;
  Scenario s = load_scenario(scenario_path("wakeup.hcn-scn"));
  const double threshold = s.knobs.high_load_threshold;
  Simulator sim(s);
  std::size_t seen = 0;
  bool loaded_at_wake = false, woke = false;
  sim.run([&](const Simulator& sm, Micros) {
    for (; seen < sm.trace().size(); ++seen) {
      if (sm.trace()[seen].verb != Verb::WAKEUP) continue;
      woke = true;
      // The only ACTIVE station must be at or over the threshold when the SBS decides to wake.
      loaded_at_wake = true;
      for (const auto& [id, d] : sm.sbs()->registry())
        if (d.power_state == PowerState::ACTIVE && d.load() < threshold) loaded_at_wake = false;
    }
  });
  o.expect(woke, "no WAKEUP in trace");
  o.expect(loaded_at_wake, "WAKEUP issued while an ACTIVE DBS was below the threshold");

  const auto wakes = with_verb(sim.trace(), Verb::WAKEUP);
  if (wakes.size() != 1) {
    o.fail("expected one WAKEUP, got " + std::to_string(wakes.size()));
    return o;
  }
  const EntityId target = wakes[0]->subject;
  const auto txn = wakes[0]->attr_u64("txn");
  o.expect(target == EntityId::dbs(3), "WAKEUP did not target the sleeping DBS");
  std::vector<std::string> got;
  for (const auto& r : sim.trace())
    if (r.attr_u64("txn") == txn && (r.verb == Verb::WAKEUP || r.verb == Verb::WAKEUP_ACK || r.verb == Verb::APPOINTMENT))
      got.push_back(std::string(to_string(r.verb)) + " " + to_string(r.actor) + " " + to_string(r.subject));
  const std::vector<std::string> want = {"WAKEUP sbs:1 dbs:3", "WAKEUP_ACK dbs:3 sbs:1", "APPOINTMENT sbs:1 dbs:3"};
  o.expect(got == want, "wake-up subsequence differs");
  return o;
}

Outcome criterion4() {
  Outcome o;
  // Zero capacity: no data station is configured at all.
  {
    Scenario s = load_scenario(scenario_path("reject.hcn-scn"));
    Simulator sim(s);
    bool camped_after_reject = false;
    sim.run([&](const Simulator& sm, Micros) {
      if (!with_verb(sm.trace(), Verb::REJECT).empty() && !camped_after_reject)
        camped_after_reject = sm.ms(100)->phase() == MsPhase::CAMPED;
    });
    auto rej = with_verb(sim.trace(), Verb::REJECT);
    o.expect(rej.size() == 1 && rej[0]->subject == EntityId::ms(100), "REJECT not addressed to the caller");
    o.expect(camped_after_reject, "MS not CAMPED after the REJECT");
    o.expect(with_verb(sim.trace(), Verb::APPOINTMENT).empty(), "APPOINTMENT present");
    o.expect(with_verb(sim.trace(), Verb::ORPHAN_ASSIGNMENT).empty(), "REJECT did not reach a requesting MS");
  }
  // Full data station: the second caller's setup is rejected without any appointment of its own.
  {
    Scenario s = load_scenario(scenario_path("full.hcn-scn"));
    Simulator sim(s);
    bool camped_after_reject = false;
    sim.run([&](const Simulator& sm, Micros) {
      if (!with_verb(sm.trace(), Verb::REJECT).empty() && !camped_after_reject)
        camped_after_reject = sm.ms(101)->phase() == MsPhase::CAMPED;
    });
    auto rej = with_verb(sim.trace(), Verb::REJECT);
    o.expect(rej.size() == 1 && rej[0]->subject == EntityId::ms(101), "full DBS: REJECT not addressed to ms:101");
    o.expect(camped_after_reject, "full DBS: MS not CAMPED after the REJECT");
    for (const auto* a : with_verb(sim.trace(), Verb::APPOINTMENT))
      o.expect(a->attr_u64("ms") != 101u, "full DBS: APPOINTMENT for the rejected caller");
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const auto& row : oracle::kOwnership) {
    auto ch = parse_logical_channel(row.name);
    if (!ch) {
      o.fail(std::string("unknown channel ") + row.name);
      continue;
    }
    RoleSet roles = allowed_roles(*ch);
    o.expect(roles.contains(Role::SBS) == row.sbs && roles.contains(Role::DBS) == row.dbs,
             std::string("ownership mismatch for ") + row.name);
  }
  o.expect(std::size(oracle::kOwnership) == kLogicalChannelCount, "ownership table does not cover all channels");
  int permitted = 0;
  for (std::uint32_t mask = 0; mask < (1u << kLogicalChannelCount); ++mask) {
    const auto m = static_cast<std::uint16_t>(mask);
    const bool want = oracle::whitelist().contains(oracle::names_of(m));
    const bool got = is_permitted_combination(ChannelSet::from_mask(m));
    permitted += got;
    if (got != want) o.fail("combination mismatch at mask " + std::to_string(mask));
  }
  o.expect(permitted == 4, "expected 4 permitted combinations");
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10000 && o.ok; ++i) {
    ControlMessage m = oracle::random_message(rng);
    MessageHeader h{static_cast<std::uint16_t>(rng()), static_cast<std::uint32_t>(rng())};
    Bytes b = encode(m, h);
    if (b != oracle::reference_encode(m, h)) o.fail("encoding differs from the reference at #" + std::to_string(i));
    auto r = decode(b);
    const auto* d = std::get_if<Decoded>(&r);
    if (!d || !(d->message == m) || !(d->header == h)) o.fail("round trip failed at #" + std::to_string(i));
    else if (encode(d->message, d->header) != b) o.fail("re-encoding not byte-exact at #" + std::to_string(i));
  }

  const Bytes good = encode({3, AppointmentResponse{true, 60, 2}}, {2, 1});
  auto kind_of = [](const Bytes& b) -> std::optional<DecodeErrorKind> {
    auto r = decode(b);
    if (const auto* e = std::get_if<DecodeError>(&r)) return e->kind;
    return std::nullopt;
  };
  Bytes magic = good;
  magic[0] = 'X';
  Bytes version = good;
  version[4] = 9;
  Bytes tag = good;
  tag[5] = 0x7F;
  Bytes trailing = good;
  trailing.push_back(0xAA);
  o.expect(kind_of(magic) == DecodeErrorKind::BAD_MAGIC, "bad magic not detected");
  o.expect(kind_of(version) == DecodeErrorKind::BAD_VERSION, "bad version not detected");
  o.expect(kind_of(tag) == DecodeErrorKind::UNKNOWN_TAG, "unknown tag not detected");
  o.expect(kind_of(trailing) == DecodeErrorKind::TRAILING_BYTES, "trailing bytes not detected");
  for (std::size_t n = 0; n < good.size(); ++n)
    o.expect(kind_of(Bytes(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n))) == DecodeErrorKind::TRUNCATED,
             "truncation not detected at length " + std::to_string(n));
  return o;
}

Scenario stress_scenario(std::uint64_t seed);

Outcome criterion7() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("hcn-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::string, Scenario>> runs;
  for (const char* f : {"mo.hcn-scn", "mt.hcn-scn", "wakeup.hcn-scn", "reject.hcn-scn", "full.hcn-scn", "deny.hcn-scn"})
    runs.emplace_back(f, load_scenario(scenario_path(f)));
  runs.emplace_back("stress", stress_scenario(7));
  for (const auto& [name, s] : runs) {
    std::string bytes[2];
    for (int k = 0; k < 2; ++k) {
      const auto path = dir / (name + "." + std::to_string(k) + ".hcn-trace");
      {
        std::ofstream out(path, std::ios::binary);
        write_trace(out, run_scenario(s).trace);
      }
      std::ifstream in(path, std::ios::binary);
      bytes[k].assign(std::istreambuf_iterator<char>(in), {});
    }
    o.expect(!bytes[0].empty(), name + ": empty trace");
    o.expect(bytes[0] == bytes[1], name + ": trace files differ");
  }
  std::filesystem::remove_all(dir);
  return o;
}

std::map<std::string, std::vector<std::string>> txn_sequences(const std::vector<TraceRecord>& trace) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& r : trace)
    if (auto txn = r.attr_u64("txn"))
      out[std::to_string(*txn)].push_back(std::string(to_string(r.verb)) + " " + to_string(r.actor) + " " +
                                          to_string(r.subject));
  return out;
}

Outcome criterion8() {
  Outcome o;
  SplitConfig cfg;
  cfg.sbs_port = 5840;
  cfg.dbs_port_base = 5841;
  for (const char* f : {"mo.hcn-scn", "mt.hcn-scn", "wakeup.hcn-scn"}) {
    Scenario s = load_scenario(scenario_path(f));
    RunResult inproc = run_scenario(s);
    RunResult split;
    try {
      split = split_run(s, cfg);
    } catch (const std::exception& e) {
      o.fail(std::string(f) + ": split-run failed: " + e.what());
      continue;
    }
    o.expect(!inproc.trace.empty(), std::string(f) + ": empty trace");
    o.expect(txn_sequences(inproc.trace) == txn_sequences(split.trace), std::string(f) + ": per-transaction sequences differ");
    o.expect(pair_sequences(inproc.trace) == pair_sequences(split.trace), std::string(f) + ": per-pair sequences differ");
    o.expect(inproc.end_time == split.end_time, std::string(f) + ": end times differ");
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (std::uint64_t f = 0; f <= 1000; ++f)
    for (int s = 0; s < 8; ++s)
      if (slot_start_time({f, s}) != static_cast<Micros>(f) * 4616 + s * 577)
        o.fail("slot_start_time wrong at frame " + std::to_string(f) + " slot " + std::to_string(s));
  o.expect(slot_start_time({1, 0}) - slot_start_time({0, 7}) == 577, "frame boundary pitch is not one slot");
  return o;
}

// Mixed MO/MT load over a few data stations with scripted denials and an idle
// timeout short enough that stations cycle through sleep and wake.
Scenario stress_scenario(std::uint64_t seed) {
  Scenario s;
  s.stations.push_back({Role::SBS, 1, {50, 5, Role::SBS}, default_channels(Role::SBS), 0, PowerState::ACTIVE});
  s.stations.push_back({Role::DBS, 2, {60, 5, Role::DBS}, default_channels(Role::DBS), 4, PowerState::ACTIVE});
  s.stations.push_back({Role::DBS, 3, {61, 5, Role::DBS}, default_channels(Role::DBS), 3, PowerState::SLEEP});
  s.stations.push_back({Role::DBS, 4, {62, 5, Role::DBS}, default_channels(Role::DBS), 2, PowerState::SLEEP});
  constexpr std::uint32_t kMobiles = 16;
  for (std::uint32_t i = 0; i < kMobiles; ++i) {
    s.mobiles.push_back({200 + i});
    s.stimuli.push_back({static_cast<Micros>(i) * 100, StimulusKind::POWER_ON, 200 + i, 0});
  }
  std::mt19937_64 rng(seed);
  Micros t = 10'000;
  for (int call = 0; call < 100; ++call) {
    t += 50'000 + static_cast<Micros>(rng() % 400'000);
    const auto ms = 200 + static_cast<std::uint32_t>(rng() % kMobiles);
    const auto kind = rng() % 2 ? StimulusKind::MO_CALL : StimulusKind::MT_CALL;
    s.stimuli.push_back({t, kind, ms, 200'000 + static_cast<Micros>(rng() % 2'500'000)});
    if (rng() % 8 == 0) s.stimuli.push_back({t + 1, StimulusKind::DENY_NEXT_APPOINTMENT, 2 + static_cast<std::uint32_t>(rng() % 3), 0});
    if (rng() % 10 == 0) s.stimuli.push_back({t + 700'000, StimulusKind::END_CALL, ms, 0});
    if (call % 25 == 24) t += 2'000'000;  // quiet spell so stations fall asleep
  }
  std::stable_sort(s.stimuli.begin(), s.stimuli.end(), [](auto& a, auto& b) { return a.time < b.time; });
  s.knobs.seed = seed;
  s.knobs.high_load_threshold = 0.6;
  s.knobs.idle_timeout = 800'000;
  s.knobs.wake_latency = 100'000;
  return s;
}

Outcome criterion10() {
  Outcome o;
  Scenario s = stress_scenario(10);
  Simulator sim(s);
  std::size_t steps = 0;
  std::vector<TraceRecord> prefix;
  sim.run([&](const Simulator& sm, Micros) {
    ++steps;
    for (const auto& v : state_violations(sm)) o.fail("conservation: " + v);
    if (sm.trace().size() == prefix.size()) return;
    prefix.assign(sm.trace().begin(), sm.trace().end());
    for (const auto& v : placement_violations(prefix)) o.fail("placement: " + v);
    for (const auto& v : causality_violations(prefix)) o.fail("causality: " + v);
    for (const auto& v : addressing_violations(prefix)) o.fail("addressing: " + v);
  });

  const auto& tr = sim.trace();
  std::size_t calls = 0, denied = 0, sleeps = 0;
  for (const auto& r : tr) {
    if (r.verb == Verb::CHANNEL_REQUEST) ++calls;
    if (r.verb == Verb::APPOINTMENT_RESPONSE && r.attr_u64("accept") == 0u) ++denied;
    if (r.verb == Verb::STATUS && r.attr("power") && *r.attr("power") == "SLEEP") ++sleeps;
  }
  std::size_t stimulated = 0;
  for (const auto& st : s.stimuli) stimulated += st.kind == StimulusKind::MO_CALL || st.kind == StimulusKind::MT_CALL;
  o.expect(stimulated == 100, "stress scenario does not hold 100 calls");
  o.expect(calls >= 50, "too few channel requests: " + std::to_string(calls));
  o.expect(!with_verb(tr, Verb::TRAFFIC).empty(), "no call reached TRAFFIC");
  o.expect(!with_verb(tr, Verb::PAGING_ACK).empty(), "no MT call completed");
  o.expect(denied > 0, "no denials exercised");
  o.expect(!with_verb(tr, Verb::WAKEUP_ACK).empty(), "no wake-up exercised");
  o.expect(sleeps > 0, "no DBS went to sleep");
  o.expect(steps > 100, "observer ran too few steps");
  if (o.ok)
    o.detail = std::to_string(calls) + " requests, " + std::to_string(denied) + " denials, " + std::to_string(sleeps) +
               " sleeps, " + std::to_string(steps) + " steps";
  return o;
}

struct Criterion {
  int number;
  const char* name;
  double limit_s;  // 0 means no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "MO conformance", 1.0, criterion1},
      {2, "MT conformance", 1.0, criterion2},
      {3, "wake-up rule", 0, criterion3},
      {4, "rejection rule", 0, criterion4},
      {5, "split legality", 1.0, criterion5},
      {6, "codec round-trip", 5.0, criterion6},
      {7, "determinism", 0, criterion7},
      {8, "transport equivalence", 10.0, criterion8},
      {9, "timing arithmetic", 0, criterion9},
      {10, "conservation and placement under stress", 30.0, criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) o.fail("runtime " + std::to_string(secs) + " s over the limit");
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3fs", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name << " (" << timing << ")";
    if (!o.detail.empty()) std::cout << " - " << o.detail;
    std::cout << '\n';
    failures += !o.ok;
  }
  return failures == 0 ? 0 : 1;
}
