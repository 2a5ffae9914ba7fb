// Timestamped protocol events and the line-oriented `.hcn-trace` format:
//
//   t=<us> actor=<role:id> verb=<VERB> subject=<role:id> k=v ...
//
// Attribute order is preserved as emitted, so equal runs format to
// byte-identical files.
#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcn/air.hpp"
#include "hcn/um_channel.hpp"

namespace hcn {

enum class Verb : std::uint8_t {
  REGISTER,
  REGISTER_ACK,
  BROADCAST,
  PAGE,
  CHANNEL_REQUEST,
  APPOINTMENT,
  APPOINTMENT_RESPONSE,
  WAKEUP,
  WAKEUP_ACK,
  ASSIGNMENT,
  RETUNE,
  PAGING_ACK,
  LINK_ESTABLISH,
  TRAFFIC,
  RELEASE,
  REJECT,
  STATUS,
  // guard violations
  UNREGISTERED_REQUEST,
  ORPHAN_RESPONSE,
  PAGE_UNKNOWN_MS,
  ORPHAN_ASSIGNMENT,
  PROTOCOL_VIOLATION,
  NOT_CAMPED,
  REQUEST_PENDING,
  NOT_IN_CALL,
  UNKNOWN_LINK,
  DEAD_LETTER,
  DROPPED_DATAGRAM,
};

std::string_view to_string(Verb v);
std::optional<Verb> parse_verb(std::string_view name);
bool is_guard_verb(Verb v);

struct TraceRecord {
  Micros time = 0;
  EntityId actor;
  Verb verb = Verb::REGISTER;
  EntityId subject;
  std::vector<std::pair<std::string, std::string>> attrs;

  TraceRecord() = default;
  TraceRecord(Micros t, EntityId a, Verb v, EntityId s) : time(t), actor(a), verb(v), subject(s) {}

  TraceRecord& with(std::string key, std::string value);
  TraceRecord& with(std::string key, std::uint64_t value) { return with(std::move(key), std::to_string(value)); }
  TraceRecord& with(std::string key, LogicalChannel ch) { return with(std::move(key), std::string(to_string(ch))); }

  const std::string* attr(std::string_view key) const;
  std::optional<std::uint64_t> attr_u64(std::string_view key) const;
  std::optional<LogicalChannel> channel() const;

  bool operator==(const TraceRecord&) const = default;
};

std::string format_record(const TraceRecord& r);
/// One JSON object per record; attrs are flattened after the fixed fields.
std::string format_record_json(const TraceRecord& r);

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses a single line; `line_no` is used for error reporting only.
TraceRecord parse_record(std::string_view line, std::size_t line_no = 1);

/// Blank lines and lines starting with '#' are skipped.
std::vector<TraceRecord> read_trace(std::istream& in);
void write_trace(std::ostream& out, std::span<const TraceRecord> records);

}  // namespace hcn
