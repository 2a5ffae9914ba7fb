// Deterministic discrete-event engine: the event queue, the abstract radio
// medium, the SBS <-> DBS control link, trace recording and energy
// accounting.
//
// Events are popped in (time, seq) order where seq is the insertion counter,
// so equal scenarios replay identically. A simulator may host only part of
// a scenario; traffic for entities hosted elsewhere goes to a RemoteLink.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <variant>
#include <vector>

#include "hcn/base_station.hpp"
#include "hcn/energy.hpp"
#include "hcn/mobile_station.hpp"
#include "hcn/scenario.hpp"
#include "hcn/trace.hpp"

namespace hcn {

/// Egress for entities hosted by another simulator instance.
class RemoteLink {
 public:
  virtual ~RemoteLink() = default;
  virtual void send_control(std::uint16_t from, std::uint16_t to, const Bytes& datagram, Micros sent_at) = 0;
  virtual void send_air(EntityId from, EntityId to, const AirMessage& msg, Micros deliver_at) = 0;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  EnergyReport energy;
  Micros end_time = 0;
};

class Simulator {
 public:
  using StepObserver = std::function<void(const Simulator&, Micros)>;

  /// Throws ScenarioError when validate_scenario reports problems.
  /// `hosted` defaults to every entity in the scenario.
  explicit Simulator(const Scenario& scenario, std::optional<std::set<EntityId>> hosted = std::nullopt,
                     RemoteLink* remote = nullptr);

  /// Runs to completion; `observer` is called after every simulated instant.
  RunResult run(const StepObserver& observer = {});

  // Stepping interface used by run() and by the split-process coordinator.
  std::optional<Micros> next_event_time() const;
  /// Processes every event stamped `t`, including ones scheduled for `t`
  /// while doing so. `t` must not precede the current time.
  void run_instant(Micros t);
  /// Closes the energy ledger at `end`.
  void finish(Micros end);
  Micros now() const { return now_; }

  void inject_control(std::uint16_t to, Bytes datagram, Micros at);
  void inject_air(EntityId from, EntityId to, AirMessage msg, Micros at);

  /// Sends over the air interface with the configured propagation delay.
  void deliver_air(EntityId from, EntityId to, AirMessage msg);
  /// Frames and sends on the control link with the configured delay.
  void deliver_control(std::uint16_t from, std::uint16_t to, const ControlMessage& msg);

  /// Later deliveries to `e` are traced as DEAD_LETTER.
  void remove_entity(EntityId e);

  bool hosts(EntityId e) const;
  const Scenario& scenario() const { return scenario_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  const SignalingStation* sbs() const { return sbs_ ? &*sbs_ : nullptr; }
  const DataStation* dbs(std::uint16_t id) const;
  const MobileStation* ms(std::uint32_t id) const;
  const std::map<std::uint16_t, DataStation>& data_stations() const { return dbs_; }
  const std::map<std::uint32_t, MobileStation>& mobiles() const { return ms_; }
  const EnergyLedger& ledger() const { return ledger_; }
  const ControlEndpoint* endpoint(std::uint16_t station) const;

 private:
  struct StimulusEvent {
    Stimulus stimulus;
  };
  struct AirEvent {
    EntityId from;
    AirMessage msg;
  };
  struct ControlEvent {
    Bytes datagram;
  };
  struct TimerEvent {
    TimerKind kind;
    std::uint64_t token;
  };
  using Payload = std::variant<StimulusEvent, AirEvent, ControlEvent, TimerEvent>;

  struct SimEvent {
    Micros time;
    std::uint64_t seq;
    EntityId target;
    Payload payload;
  };
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void schedule(Micros at, EntityId target, Payload payload);
  void dispatch(const SimEvent& ev);
  void handle_stimulus(const Stimulus& s);
  void handle_air(EntityId from, EntityId to, const AirMessage& msg);
  void handle_control(std::uint16_t to, const Bytes& datagram);
  void handle_timer(EntityId owner, TimerKind kind, std::uint64_t token);
  void apply(EntityId owner, Outbox& out);
  bool exists(EntityId e) const;
  void dead_letter(EntityId from, EntityId to, std::string_view what);

  Scenario scenario_;
  std::set<EntityId> known_;
  std::set<EntityId> hosted_;
  std::set<EntityId> removed_;
  RemoteLink* remote_;

  std::optional<SignalingStation> sbs_;
  std::map<std::uint16_t, DataStation> dbs_;
  std::map<std::uint32_t, MobileStation> ms_;
  std::map<std::uint16_t, ControlEndpoint> endpoints_;
  std::vector<VisibleCarrier> carriers_;

  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  Micros now_ = 0;
  bool started_ = false;

  std::vector<TraceRecord> trace_;
  EnergyLedger ledger_;
};

/// Single-process run of a whole scenario.
RunResult run_scenario(const Scenario& scenario, const Simulator::StepObserver& observer = {});

}  // namespace hcn
