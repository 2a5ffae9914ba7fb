// Run statistics for the command-line front end.
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "hcn/energy.hpp"
#include "hcn/simulator.hpp"

namespace hcn {

struct RunSummary {
  std::uint64_t attempted = 0;  // channel requests
  std::uint64_t connected = 0;  // established traffic links
  std::uint64_t rejected = 0;
  std::uint64_t wakeups = 0;
  Micros end_time = 0;
  EnergyReport energy;
};

RunSummary summarize(const RunResult& result);

/// Aligned, human-oriented table.
std::string format_summary(const RunSummary& s);
/// One JSON object on a single line.
std::string format_summary_json(const RunSummary& s);

}  // namespace hcn
