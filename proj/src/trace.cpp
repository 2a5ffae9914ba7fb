#include "hcn/trace.hpp"

#include <array>
#include <charconv>

#include <json.hpp>

namespace hcn {

namespace {

constexpr std::array<std::string_view, 28> kVerbNames = {
    "REGISTER",
    "REGISTER_ACK",
    "BROADCAST",
    "PAGE",
    "CHANNEL_REQUEST",
    "APPOINTMENT",
    "APPOINTMENT_RESPONSE",
    "WAKEUP",
    "WAKEUP_ACK",
    "ASSIGNMENT",
    "RETUNE",
    "PAGING_ACK",
    "LINK_ESTABLISH",
    "TRAFFIC",
    "RELEASE",
    "REJECT",
    "STATUS",
    "UNREGISTERED_REQUEST",
    "ORPHAN_RESPONSE",
    "PAGE_UNKNOWN_MS",
    "ORPHAN_ASSIGNMENT",
    "PROTOCOL_VIOLATION",
    "NOT_CAMPED",
    "REQUEST_PENDING",
    "NOT_IN_CALL",
    "UNKNOWN_LINK",
    "DEAD_LETTER",
    "DROPPED_DATAGRAM",
};

bool valid_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ' ' || c == '=' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

std::string_view next_field(std::string_view& rest) {
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  const std::size_t end = rest.find(' ');
  std::string_view field = rest.substr(0, end);
  rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
  return field;
}

}  // namespace

std::string_view to_string(Verb v) { return kVerbNames[static_cast<std::size_t>(v)]; }

std::optional<Verb> parse_verb(std::string_view name) {
  for (std::size_t i = 0; i < kVerbNames.size(); ++i) {
    if (kVerbNames[i] == name) return static_cast<Verb>(i);
  }
  return std::nullopt;
}

bool is_guard_verb(Verb v) { return v >= Verb::UNREGISTERED_REQUEST; }

TraceRecord& TraceRecord::with(std::string key, std::string value) {
  if (!valid_token(key) || !valid_token(value)) {
    throw std::invalid_argument("trace attribute '" + key + "=" + value + "' is not a single token");
  }
  attrs.emplace_back(std::move(key), std::move(value));
  return *this;
}

const std::string* TraceRecord::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::optional<std::uint64_t> TraceRecord::attr_u64(std::string_view key) const {
  const std::string* v = attr(key);
  if (!v) return std::nullopt;
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) return std::nullopt;
  return out;
}

std::optional<LogicalChannel> TraceRecord::channel() const {
  const std::string* v = attr("channel");
  if (!v) return std::nullopt;
  return parse_logical_channel(*v);
}

std::string format_record(const TraceRecord& r) {
  std::string out = "t=" + std::to_string(r.time);
  out += " actor=" + to_string(r.actor);
  out += " verb=";
  out += to_string(r.verb);
  out += " subject=" + to_string(r.subject);
  for (const auto& [k, v] : r.attrs) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

std::string format_record_json(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = r.time;
  j["actor"] = to_string(r.actor);
  j["verb"] = std::string(to_string(r.verb));
  j["subject"] = to_string(r.subject);
  for (const auto& [k, v] : r.attrs) j[k] = v;
  return j.dump();
}

TraceRecord parse_record(std::string_view line, std::size_t line_no) {
  auto fail = [line_no](const std::string& why) { return TraceParseError(line_no, why); };
  auto expect = [&](std::string_view& rest, std::string_view key) {
    std::string_view field = next_field(rest);
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos || field.substr(0, eq) != key) {
      throw fail("expected '" + std::string(key) + "=' but found '" + std::string(field) + "'");
    }
    return field.substr(eq + 1);
  };

  std::string_view rest = line;
  TraceRecord r;
  const std::string_view t = expect(rest, "t");
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), r.time);
  if (ec != std::errc{} || ptr != t.data() + t.size() || r.time < 0) throw fail("bad timestamp '" + std::string(t) + "'");

  const std::string_view actor = expect(rest, "actor");
  auto a = parse_entity(actor);
  if (!a) throw fail("bad actor '" + std::string(actor) + "'");
  r.actor = *a;

  const std::string_view verb = expect(rest, "verb");
  auto v = parse_verb(verb);
  if (!v) throw fail("unknown verb '" + std::string(verb) + "'");
  r.verb = *v;

  const std::string_view subject = expect(rest, "subject");
  auto s = parse_entity(subject);
  if (!s) throw fail("bad subject '" + std::string(subject) + "'");
  r.subject = *s;

  while (true) {
    std::string_view field = next_field(rest);
    if (field.empty()) break;
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == field.size()) {
      throw fail("malformed attribute '" + std::string(field) + "'");
    }
    r.attrs.emplace_back(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
  }
  return r;
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    TraceRecord r = parse_record(line, line_no);
    if (!out.empty() && r.time < out.back().time) {
      throw TraceParseError(line_no, "timestamp goes backwards");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  for (const TraceRecord& r : records) out << format_record(r) << '\n';
}

}  // namespace hcn
