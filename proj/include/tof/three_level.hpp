#pragma once

// Detuned three-level system {|0>, |1>, |2>} driven on 0-1 (omega1) and 1-2
// (omega2), started in |0> and measured on |2>.

#include <string_view>
#include <vector>

#include "tof/quantum_core.hpp"
#include "tof/tf_distribution.hpp"

namespace tof::three_level {

/// Angular frequencies (rad/us with hbar = 1 by default).
struct Params {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double detuning = 0.0;

  void validate() const;
  bool operator==(const Params&) const = default;
};

/// hbar * [[0, W1/2, 0], [W1/2, D, W2/2], [0, W2/2, 0]].
Hamiltonian build_hamiltonian(const Params& p, const UnitSystem& units = UnitSystem::rad_per_us());

/// sqrt(W1^2 + W2^2 + D^2).
double generalized_rabi(const Params& p);

/// One Rabi period 2 pi / W.
double rabi_window(const Params& p);

enum class Swept { omega1, detuning };

std::string_view to_string(Swept s);

struct SweepSpec {
  Swept swept = Swept::detuning;
  std::vector<double> values;
  Params fixed;  // the swept field is ignored
  int grid_points_per_period = 2001;

  void validate() const;
  bool operator==(const SweepSpec&) const = default;
};

/// 50 points over [0.1, 5] for omega1 (omega2 = detuning = 1), or over [0, 5]
/// for the detuning (omega1 = omega2 = 1).
SweepSpec default_sweep(Swept swept, int points = 50);

struct SweepRow {
  double value = 0.0;
  double omega = 0.0;
  double window = 0.0;
  double time_spread = 0.0;
  double energy_spread = 0.0;
  double product = 0.0;
  double bound = 0.0;
  double delta_theta = 0.0;
  bool passed = false;
  bool skipped = false;  // stationary: |2> never populated
};

struct SweepResult {
  Swept swept;
  std::vector<SweepRow> rows;
};

Params with_value(const SweepSpec& spec, double value);

/// TF distribution of |2><2| over one Rabi period and its time-energy audit.
SweepRow analyze(const Params& p, double value, int grid_points, const UnitSystem& units = UnitSystem::rad_per_us());

SweepResult uncertainty_sweep(const SweepSpec& spec, const UnitSystem& units = UnitSystem::rad_per_us());

struct Series {
  TimeGrid grid;
  Eigen::VectorXd population;  // p2(t)
  Eigen::VectorXd density;
};

Series series(const Params& p, int grid_points, const UnitSystem& units = UnitSystem::rad_per_us());

}  // namespace tof::three_level
