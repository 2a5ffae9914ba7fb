// Trace-level checks: call-flow templates, placement predicates, causality
// and transport-equivalence keys.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcn/trace.hpp"

namespace hcn {

class Simulator;

enum class CallTemplate : std::uint8_t { MO, MT };

std::optional<CallTemplate> parse_template(std::string_view name);
std::string_view to_string(CallTemplate t);

/// Verbs that take part in template matching; everything else is ignored.
bool is_template_verb(Verb v);

struct TemplateMatch {
  bool ok = false;
  std::string edge;  // "ASSIGNMENT -> TRAFFIC", or with START / END
};

/// Exact match of a filtered verb sequence against the template automaton.
/// The optional WAKEUP, WAKEUP_ACK pair may appear right before APPOINTMENT;
/// MT calls may repeat PAGE.
TemplateMatch match_template(std::span<const Verb> verbs, CallTemplate t);

struct CallSegment {
  std::uint32_t ms_id = 0;
  CallTemplate kind = CallTemplate::MO;
  std::vector<std::size_t> records;  // indices into the trace
  std::vector<Verb> verbs;
};

/// Splits a trace into per-MS call attempts. A call opens at PAGE or at a
/// CHANNEL_REQUEST that does not answer an open page. Station records are
/// attributed to a mobile through their subject, their `ms` attribute or a
/// previously seen `txn`.
std::vector<CallSegment> segment_calls(std::span<const TraceRecord> trace);

struct CheckReport {
  bool pass = false;
  std::size_t calls_checked = 0;
  std::vector<std::string> failures;
};

/// PASS iff at least one call of kind `t` exists and every such call matches.
CheckReport check_template(std::span<const TraceRecord> trace, CallTemplate t);

/// Functionality and channel placement: paging and broadcast come from the
/// SBS, traffic-link events from a DBS, and every channel attribute is
/// allowed for the base-station party of its record.
std::vector<std::string> placement_violations(std::span<const TraceRecord> trace);

/// Effects never precede their causes within a transaction.
std::vector<std::string> causality_violations(std::span<const TraceRecord> trace);

/// A mobile addresses a DBS only after an assignment naming that DBS.
std::vector<std::string> addressing_violations(std::span<const TraceRecord> trace);

/// Established traffic links equal in-call mobiles, and loads stay in [0,1]
/// with zero load while asleep.
std::vector<std::string> state_violations(const Simulator& sim);

/// "VERB actor subject" lines grouped by unordered entity pair, timestamps
/// erased. Two traces are transport-equivalent iff these maps are equal.
std::map<std::string, std::vector<std::string>> pair_sequences(std::span<const TraceRecord> trace);

}  // namespace hcn
