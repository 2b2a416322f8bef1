#pragma once

#include <string>

#include "tof/errors.hpp"

namespace tof {

/// Value of hbar plus labels for the time and energy units. Energies are
/// expressed so that energy * time carries the units of `hbar`.
struct UnitSystem {
  double hbar = 1.0;
  std::string time_unit = "1";
  std::string energy_unit = "hbar/time";

  void validate() const {
    if (!(hbar > 0.0)) throw ValidationError("unit system: hbar must be positive");
  }

  static UnitSystem natural() { return {}; }
  static UnitSystem si() { return {1.054571817e-34, "s", "J"}; }
  /// hbar = 1 with angular frequencies in rad/us and times in us.
  static UnitSystem rad_per_us() { return {1.0, "us", "hbar*rad/us"}; }
};

}  // namespace tof
