// Scenario description and the `.hcn-scn` text format.
//
//   # comment
//   [stations]
//   sbs id=1 arfcn=50 color=1
//   dbs id=2 arfcn=60 color=1 capacity=7 power=ACTIVE [channels=TCH,SACCH,FACCH,SDCCH]
//   [mobiles]
//   ms id=100
//   [stimuli]
//   0 POWER_ON ms=100
//   10000 MO_CALL ms=100 duration=2000000
//   15000 MT_CALL ms=101 duration=1000000
//   20000 END_CALL ms=100
//   30000 DENY_NEXT_APPOINTMENT dbs=2
//   [knobs]
//   seed=1
//   high_load_threshold=0.8
#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcn/energy.hpp"
#include "hcn/protocol.hpp"
#include "hcn/um_channel.hpp"

namespace hcn {

struct StationSpec {
  Role role = Role::SBS;
  std::uint16_t id = 0;
  CarrierConfig carrier;
  ChannelSet channels;
  std::uint32_t capacity = 7;  // DBS only
  PowerState initial_power = PowerState::ACTIVE;
};

struct MobileSpec {
  std::uint32_t id = 0;
};

enum class StimulusKind : std::uint8_t { POWER_ON, MO_CALL, MT_CALL, END_CALL, DENY_NEXT_APPOINTMENT };

std::string_view to_string(StimulusKind k);

struct Stimulus {
  Micros time = 0;
  StimulusKind kind = StimulusKind::POWER_ON;
  std::uint32_t target = 0;  // ms id, or dbs id for DENY_NEXT_APPOINTMENT
  Micros duration = 0;       // call hold time for MO_CALL / MT_CALL
};

struct Knobs {
  std::uint64_t seed = 1;
  double high_load_threshold = 0.8;
  Micros wake_latency = 100'000;
  Micros idle_timeout = 5'000'000;
  Micros control_delay = 1'000;
  Micros air_delay = 0;
  std::optional<Micros> horizon;
  PowerModel power;
  bool allowlist_mode = false;
  std::vector<std::uint32_t> allowlist;
};

struct Scenario {
  std::vector<StationSpec> stations;
  std::vector<MobileSpec> mobiles;
  std::vector<Stimulus> stimuli;
  Knobs knobs;

  const StationSpec* sbs() const;
  std::vector<const StationSpec*> dbs_stations() const;  // in declaration order
  const StationSpec* station(std::uint16_t id) const;
  bool has_mobile(std::uint32_t id) const;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax errors only; semantic checks live in validate_scenario.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& s);

/// Every problem found, empty when the scenario can run.
std::vector<std::string> validate_scenario(const Scenario& s);

}  // namespace hcn
