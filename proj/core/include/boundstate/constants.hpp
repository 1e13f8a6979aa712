#pragma once

namespace boundstate {

/// Physical constants in atomic units.
struct PhysicalConstants {
  double hbar = 1.0;
  double m = 1.0;
  double c = 137.035999084;

  double rest_energy() const { return m * c * c; }
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace boundstate
