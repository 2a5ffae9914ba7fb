#include "hcn/air.hpp"

#include <charconv>
#include <vector>

namespace hcn {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<ServiceKind> service(std::string_view s) {
  auto v = number<unsigned>(s);
  if (!v || (*v != 1 && *v != 2)) return std::nullopt;
  return static_cast<ServiceKind>(*v);
}

}  // namespace

std::string to_string(EntityId e) {
  std::string_view prefix = e.kind == EntityKind::SBS ? "sbs:" : e.kind == EntityKind::DBS ? "dbs:" : "ms:";
  return std::string(prefix) + std::to_string(e.id);
}

std::optional<EntityId> parse_entity(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const std::string_view prefix = text.substr(0, colon);
  EntityKind kind;
  if (prefix == "sbs") {
    kind = EntityKind::SBS;
  } else if (prefix == "dbs") {
    kind = EntityKind::DBS;
  } else if (prefix == "ms") {
    kind = EntityKind::MS;
  } else {
    return std::nullopt;
  }
  auto id = number<std::uint32_t>(text.substr(colon + 1));
  if (!id) return std::nullopt;
  return EntityId{kind, *id};
}

std::optional<Role> role_of(EntityId e) {
  switch (e.kind) {
    case EntityKind::SBS: return Role::SBS;
    case EntityKind::DBS: return Role::DBS;
    case EntityKind::MS: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(RejectReason) { return "NO_DBS_AVAILABLE"; }

std::string to_text(const AirMessage& msg) {
  auto n = [](auto v) { return std::to_string(static_cast<unsigned long long>(v)); };
  return std::visit(
      [&n](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, air::RegisterRequest>) return "REG," + n(m.ms_id);
        if constexpr (std::is_same_v<T, air::RegisterResult>) return "REGRES," + n(m.accepted);
        if constexpr (std::is_same_v<T, air::ChannelRequest>)
          return "CHREQ," + n(m.ms_id) + "," + n(static_cast<unsigned>(m.kind)) + "," + n(m.random_ref);
        if constexpr (std::is_same_v<T, air::Assignment>)
          return "ASSIGN," + n(m.dbs_id) + "," + n(m.arfcn) + "," + n(m.slot) + "," +
                 n(static_cast<unsigned>(m.kind));
        if constexpr (std::is_same_v<T, air::AssignmentReject>) return "ASSREJ," + n(static_cast<unsigned>(m.reason));
        if constexpr (std::is_same_v<T, air::Paging>) return "PAGE," + n(m.ms_id);
        if constexpr (std::is_same_v<T, air::PagingAck>) return "PAGEACK," + n(m.ms_id);
        if constexpr (std::is_same_v<T, air::LinkRequest>) return "LINKREQ," + n(m.ms_id);
        if constexpr (std::is_same_v<T, air::LinkConfirm>) return "LINKCNF," + n(m.slot);
        if constexpr (std::is_same_v<T, air::LinkTeardown>) return "TEARDOWN," + n(m.ms_id);
      },
      msg);
}

std::optional<AirMessage> air_from_text(std::string_view text) {
  const auto f = split(text, ',');
  const std::string_view tag = f[0];
  auto u32 = [&f](std::size_t i) { return i < f.size() ? number<std::uint32_t>(f[i]) : std::nullopt; };
  auto u16 = [&f](std::size_t i) { return i < f.size() ? number<std::uint16_t>(f[i]) : std::nullopt; };
  auto u8 = [&f](std::size_t i) -> std::optional<std::uint8_t> {
    if (i >= f.size()) return std::nullopt;
    auto v = number<unsigned>(f[i]);
    if (!v || *v > 255) return std::nullopt;
    return static_cast<std::uint8_t>(*v);
  };
  auto arity = [&f](std::size_t n) { return f.size() == n + 1; };

  if (tag == "REG" && arity(1)) {
    if (auto id = u32(1)) return air::RegisterRequest{*id};
  } else if (tag == "REGRES" && arity(1)) {
    if (auto v = u8(1); v && *v <= 1) return air::RegisterResult{*v == 1};
  } else if (tag == "CHREQ" && arity(3)) {
    auto id = u32(1);
    auto kind = service(f[2]);
    auto ref = u8(3);
    if (id && kind && ref) return air::ChannelRequest{*id, *kind, *ref};
  } else if (tag == "ASSIGN" && arity(4)) {
    auto dbs = u16(1);
    auto arfcn = u16(2);
    auto slot = u8(3);
    auto kind = service(f[4]);
    if (dbs && arfcn && slot && kind) return air::Assignment{*dbs, *arfcn, *slot, *kind};
  } else if (tag == "ASSREJ" && arity(1)) {
    if (auto v = u8(1); v && *v == 0) return air::AssignmentReject{RejectReason::NO_DBS_AVAILABLE};
  } else if (tag == "PAGE" && arity(1)) {
    if (auto id = u32(1)) return air::Paging{*id};
  } else if (tag == "PAGEACK" && arity(1)) {
    if (auto id = u32(1)) return air::PagingAck{*id};
  } else if (tag == "LINKREQ" && arity(1)) {
    if (auto id = u32(1)) return air::LinkRequest{*id};
  } else if (tag == "LINKCNF" && arity(1)) {
    if (auto slot = u8(1)) return air::LinkConfirm{*slot};
  } else if (tag == "TEARDOWN" && arity(1)) {
    if (auto id = u32(1)) return air::LinkTeardown{*id};
  }
  return std::nullopt;
}

}  // namespace hcn
