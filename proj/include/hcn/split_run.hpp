// Runs a scenario with the SBS (and the mobiles it serves) in one process and
// every DBS in a process of its own. Control messages travel as raw
// datagrams over UDP loopback; the parent keeps the processes in lock-step on
// virtual time and relays air-interface events between them.
#pragma once

#include <cstdint>

#include "hcn/scenario.hpp"
#include "hcn/simulator.hpp"

namespace hcn {

struct SplitConfig {
  std::uint16_t sbs_port = 5700;
  std::uint16_t dbs_port_base = 5701;  // k-th DBS in declaration order uses base + k
  int receive_timeout_ms = 2000;
};

/// Throws TransportError when a port cannot be bound or a child fails, and
/// ScenarioError for invalid scenarios.
RunResult split_run(const Scenario& scenario, const SplitConfig& config = {});

}  // namespace hcn
