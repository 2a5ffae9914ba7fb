#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "hcn/conformance.hpp"
#include "hcn/simulator.hpp"

using namespace hcn;

namespace {

const char* kMo = R"([stations]
sbs id=1 arfcn=50 color=3
dbs id=2 arfcn=60 color=3 capacity=7 power=ACTIVE
[mobiles]
ms id=100
ms id=101
[stimuli]
0 POWER_ON ms=100
0 POWER_ON ms=101
10000 MO_CALL ms=100 duration=2000000
)";

const char* kMt = R"([stations]
sbs id=1 arfcn=50 color=3
dbs id=2 arfcn=60 color=3 capacity=7 power=ACTIVE
[mobiles]
ms id=100
ms id=101
[stimuli]
0 POWER_ON ms=100
0 POWER_ON ms=101
10000 MT_CALL ms=101 duration=1000000
)";

std::vector<const TraceRecord*> with_verb(const std::vector<TraceRecord>& trace, Verb v) {
  std::vector<const TraceRecord*> out;
  for (const auto& r : trace)
    if (r.verb == v) out.push_back(&r);
  return out;
}

std::string text(const std::vector<TraceRecord>& trace) {
  std::ostringstream os;
  write_trace(os, trace);
  return os.str();
}

}  // namespace

TEST_CASE("a scenario with no stimuli produces no trace and no active time") {
  Scenario s = parse_scenario_text(
      "[stations]\nsbs id=1 arfcn=50 color=1\ndbs id=2 arfcn=60 color=1 power=SLEEP\n[knobs]\nhorizon_us=10000000\n");
  RunResult r = run_scenario(s);
  CHECK(r.trace.empty());
  CHECK(r.end_time == 10'000'000);
  REQUIRE(r.energy.per_dbs.size() == 1);
  CHECK(r.energy.per_dbs[0].times.active_us == 0);
  CHECK(r.energy.per_dbs[0].times.sleep_us == 10'000'000);
}

TEST_CASE("control messages arrive one control delay after they are sent") {
  RunResult r = run_scenario(parse_scenario_text(kMo));
  auto appt = with_verb(r.trace, Verb::APPOINTMENT);
  auto resp = with_verb(r.trace, Verb::APPOINTMENT_RESPONSE);
  auto asg = with_verb(r.trace, Verb::ASSIGNMENT);
  REQUIRE(appt.size() == 1);
  REQUIRE(resp.size() == 1);
  REQUIRE(asg.size() == 1);
  CHECK(appt[0]->time == 10'000);
  CHECK(resp[0]->time == 11'000);
  CHECK(asg[0]->time == 12'000);
}

TEST_CASE("a full MO call returns every party to idle") {
  Scenario s = parse_scenario_text(kMo);
  Simulator sim(s);
  sim.run();
  CHECK(sim.ms(100)->phase() == MsPhase::CAMPED);
  CHECK(sim.ms(101)->phase() == MsPhase::CAMPED);
  CHECK(sim.dbs(2)->busy_slots() == 0);
  CHECK(sim.sbs()->registry().at(2).occupied == 0);
  CHECK(with_verb(sim.trace(), Verb::RELEASE).size() == 2);  // MS -> DBS, DBS -> SBS
  CHECK(state_violations(sim).empty());
}

TEST_CASE("pages fan out to every camped handset and only the addressee answers") {
  RunResult r = run_scenario(parse_scenario_text(kMt));
  auto req = with_verb(r.trace, Verb::CHANNEL_REQUEST);
  REQUIRE(req.size() == 1);
  CHECK(req[0]->actor == EntityId::ms(101));
  CHECK(with_verb(r.trace, Verb::PAGE).size() == 1);
  CHECK(with_verb(r.trace, Verb::DEAD_LETTER).empty());
}

TEST_CASE("deliveries to a removed entity become dead letters") {
  Simulator sim(parse_scenario_text(kMo));
  sim.remove_entity(EntityId::dbs(2));
  sim.run();
  auto dead = with_verb(sim.trace(), Verb::DEAD_LETTER);
  REQUIRE(dead.size() == 1);
  CHECK(dead[0]->subject == EntityId::dbs(2));
  CHECK(dead[0]->time == 11'000);
  CHECK(with_verb(sim.trace(), Verb::ASSIGNMENT).empty());
}

TEST_CASE("malformed and replayed datagrams are dropped and traced") {
  Simulator sim(parse_scenario_text(kMo));
  sim.inject_control(2, Bytes{'H', 'C'}, 5);
  ControlEndpoint fake(9);
  Bytes d = fake.frame(2, ControlMessage{9, WakeupCommand{2}});
  sim.inject_control(2, d, 5);
  sim.inject_control(2, d, 6);
  sim.run();
  auto drops = with_verb(sim.trace(), Verb::DROPPED_DATAGRAM);
  REQUIRE(drops.size() == 2);
  CHECK(*drops[0]->attr("reason") == "TRUNCATED");
  CHECK(*drops[1]->attr("reason") == "duplicate");
}

TEST_CASE("equal seeds replay byte-identically") {
  Scenario s = parse_scenario_text(kMo);
  s.stimuli.push_back({20'000, StimulusKind::MT_CALL, 101, 500'000});
  const std::string a = text(run_scenario(s).trace);
  const std::string b = text(run_scenario(s).trace);
  CHECK(a == b);
  CHECK_FALSE(a.empty());
}

TEST_CASE("invalid scenarios are refused before running") {
  Scenario s = parse_scenario_text(kMo);
  s.stations[1].carrier.arfcn = 50;
  CHECK_THROWS_AS(Simulator{s}, ScenarioError);
}

TEST_CASE("the observer sees every instant in order") {
  std::vector<Micros> seen;
  run_scenario(parse_scenario_text(kMo), [&](const Simulator& sim, Micros t) {
    CHECK(sim.now() == t);
    seen.push_back(t);
  });
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}
