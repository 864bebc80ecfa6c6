#include "egogate/power.hpp"

#include <stdexcept>

namespace egogate {

PowerBreakdown duty_cycle_power(const std::vector<PowerComponent>& components) {
  PowerBreakdown out;
  out.components.reserve(components.size());
  for (const auto& c : components) {
    if (c.active_power_w < 0.0 || c.idle_power_w < 0.0) {
      throw std::invalid_argument("negative power for component '" + c.name + "'");
    }
    if (c.duty < 0.0 || c.duty > 1.0) {
      throw std::invalid_argument("duty outside [0, 1] for component '" + c.name + "'");
    }
    const double avg = c.active_power_w * c.duty + c.idle_power_w * (1.0 - c.duty);
    out.components.push_back({c.name, avg});
    out.total_w += avg;
  }
  return out;
}

}  // namespace egogate
