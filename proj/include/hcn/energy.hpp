// Per-DBS time-in-state and energy accounting.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hcn/protocol.hpp"
#include "hcn/um_channel.hpp"

namespace hcn {

/// Watts drawn in each power state. Defaults are placeholders for relative
/// comparisons only.
struct PowerModel {
  double sleep_w = 5.0;
  double waking_w = 30.0;
  double active_w = 50.0;

  double watts(PowerState s) const;
};

struct StateTimes {
  Micros sleep_us = 0;
  Micros waking_us = 0;
  Micros active_us = 0;

  Micros total() const { return sleep_us + waking_us + active_us; }
  Micros& operator[](PowerState s);
  bool operator==(const StateTimes&) const = default;
};

class EnergyLedger {
 public:
  EnergyLedger() = default;
  explicit EnergyLedger(PowerModel model) : model_(model) {}

  void open(std::uint16_t dbs_id, PowerState initial, Micros at = 0);
  /// Closes the current interval at `at` and starts a new one.
  void transition(std::uint16_t dbs_id, PowerState next, Micros at);
  /// Closes every open interval at the end of the run.
  void close(Micros end);

  const PowerModel& model() const { return model_; }
  const std::map<std::uint16_t, StateTimes>& times() const { return times_; }
  bool closed() const { return closed_; }

 private:
  struct Open {
    PowerState state;
    Micros since;
  };

  PowerModel model_;
  std::map<std::uint16_t, StateTimes> times_;
  std::map<std::uint16_t, Open> open_;
  bool closed_ = false;
};

struct DbsEnergy {
  std::uint16_t dbs_id = 0;
  StateTimes times;
  double joules = 0.0;
};

struct EnergyReport {
  std::vector<DbsEnergy> per_dbs;  // ordered by id
  double total_joules = 0.0;
};

EnergyReport energy_report(const std::map<std::uint16_t, StateTimes>& times, const PowerModel& model);
EnergyReport energy_report(const EnergyLedger& ledger);

}  // namespace hcn
