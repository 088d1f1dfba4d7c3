#include "docubits/anim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace docubits {

Appearance appearance(Status status, double t, const AnimConfig& config) {
  t = std::max(t, 0.0);
  switch (status) {
    case Status::NotAttempted:
      return {0.0, 1.0, Tint::White, Indicator::NoneLit};
    case Status::InProgress:
      return {0.0, 1.0, Tint::White, Indicator::Amber};
    case Status::Blocked: {
      const double phase = 2.0 * std::numbers::pi * config.bounce_hz * t;
      return {config.bounce_amplitude * std::abs(std::sin(phase)), 1.0, Tint::White, Indicator::Red};
    }
    case Status::Completed:
      return {std::min(config.rise_rate * t, config.rise_cap),
              std::max(1.0 - config.fade_rate * t, config.opacity_floor), Tint::Gray,
              Indicator::Green};
  }
  return {};
}

}  // namespace docubits
