// Side effects produced by a state-machine step. The engine routes them; the
// state machines themselves never touch the event queue or the transport.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hcn/air.hpp"
#include "hcn/protocol.hpp"
#include "hcn/trace.hpp"

namespace hcn {

enum class TimerKind : std::uint8_t { WAKE_COMPLETE, IDLE_CHECK, CALL_END };

struct AirSend {
  EntityId to;               // ignored when to_camped is set
  AirMessage message;
  bool to_camped = false;    // fan out to every MS camped on the sender's carrier
};

struct ControlSend {
  std::uint16_t to_station = 0;
  ControlMessage message;
};

struct TimerRequest {
  Micros delay = 0;
  TimerKind kind = TimerKind::CALL_END;
  std::uint64_t token = 0;
};

struct Outbox {
  std::vector<TraceRecord> trace;
  std::vector<AirSend> air;
  std::vector<ControlSend> control;
  std::vector<TimerRequest> timers;
  std::vector<PowerState> power_changes;  // in order; DBS only

  TraceRecord& record(Micros now, EntityId actor, Verb verb, EntityId subject) {
    return trace.emplace_back(now, actor, verb, subject);
  }
  bool empty() const {
    return trace.empty() && air.empty() && control.empty() && timers.empty() && power_changes.empty();
  }
};

}  // namespace hcn
