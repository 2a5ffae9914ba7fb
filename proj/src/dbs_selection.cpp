#include <algorithm>
#include <optional>

#include "hcn/base_station.hpp"

namespace hcn {

namespace {

bool is_excluded(std::span<const std::uint16_t> excluded, std::uint16_t id) {
  return std::find(excluded.begin(), excluded.end(), id) != excluded.end();
}

// Least quantized load, then lowest id. The registry is ordered by id, so the
// first strict improvement wins ties.
template <typename Pred>
std::optional<std::uint16_t> least_loaded(const DbsRegistry& registry, std::span<const std::uint16_t> excluded,
                                          Pred&& eligible) {
  std::optional<std::uint16_t> best;
  std::uint8_t best_load = 0;
  for (const auto& [id, d] : registry) {
    if (is_excluded(excluded, id) || d.power_state != PowerState::ACTIVE || !eligible(d)) continue;
    const std::uint8_t q = quantize_load(std::clamp(d.load(), 0.0, 1.0));
    if (!best || q < best_load) {
      best = id;
      best_load = q;
    }
  }
  return best;
}

}  // namespace

AppointmentDecision select_dbs(const DbsRegistry& registry, double threshold,
                               std::span<const std::uint16_t> excluded) {
  auto has_room = [](const DbsDescriptor& d) { return d.occupied < d.capacity; };

  if (auto id = least_loaded(registry, excluded,
                             [&](const DbsDescriptor& d) { return has_room(d) && d.load() < threshold; })) {
    return AppointmentDecision::appoint(*id);
  }
  for (const auto& [id, d] : registry) {
    if (d.power_state == PowerState::SLEEP && !is_excluded(excluded, id)) return AppointmentDecision::wake(id);
  }
  if (auto id = least_loaded(registry, excluded, has_room)) return AppointmentDecision::appoint(*id);
  return AppointmentDecision::reject();
}

}  // namespace hcn
