#pragma once

#include <string>
#include <vector>

namespace egogate {

// One hardware block in the duty-cycle power model. Average draw is
// active_power_w * duty + idle_power_w * (1 - duty).
struct PowerComponent {
  std::string name;
  double active_power_w = 0.0;
  double duty = 1.0;
  double idle_power_w = 0.0;
};

struct ComponentAverage {
  std::string name;
  double average_w = 0.0;
};

struct PowerBreakdown {
  std::vector<ComponentAverage> components;
  double total_w = 0.0;
};

PowerBreakdown duty_cycle_power(const std::vector<PowerComponent>& components);

}  // namespace egogate
