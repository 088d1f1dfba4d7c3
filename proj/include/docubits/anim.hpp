#pragma once

#include "docubits/bit_state.hpp"

namespace docubits {

enum class Tint { White, Gray };
enum class Indicator { NoneLit, Green, Red, Amber };

struct Appearance {
  double vertical_offset = 0;  // meters
  double opacity = 1;
  Tint body_tint = Tint::White;
  Indicator indicator = Indicator::NoneLit;

  friend bool operator==(const Appearance&, const Appearance&) = default;
};

// Magnitudes for the status behaviors. Completed bits rise and fade to a
// legible floor; blocked bits bounce on a rectified sine.
struct AnimConfig {
  double rise_rate = 0.15;        // m/s
  double rise_cap = 0.5;          // m
  double fade_rate = 0.2;         // opacity per second
  double opacity_floor = 0.35;
  double bounce_amplitude = 0.05; // m
  double bounce_hz = 1.0;

  friend bool operator==(const AnimConfig&, const AnimConfig&) = default;
};

// `t` is seconds since the bit's status last changed; negative t is clamped to 0.
Appearance appearance(Status status, double t, const AnimConfig& config = {});

}  // namespace docubits
