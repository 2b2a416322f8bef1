#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tof/quantum_core.hpp"
#include "tof/tf_distribution.hpp"

namespace tof {

enum class TrialStatus {
  audited,
  skipped_stationary,   // zero flow: nothing to audit
  undefined_bound,      // flow present but zero net transfer; rate and time-energy bounds undefined
};

std::string_view to_string(TrialStatus status);

struct TrialAudit {
  TrialStatus status = TrialStatus::audited;
  double delta_theta = 0.0;
  double energy_spread = 0.0;
  std::optional<BoundAudit> chebyshev;
  std::optional<BoundAudit> uniform_rate;
  std::optional<BoundAudit> time_energy;

  bool violated() const;
};

/// Audits all three inequalities for one closed system over `grid`.
TrialAudit audit_system(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                        const TimeGrid& grid, const UnitSystem& units);

struct RandomSystem {
  Hamiltonian h;
  DensityMatrix rho0;
  Projector m;
  int state_rank;
};

/// Gaussian-unitary-ensemble H, a pure or mixed state of random rank and a
/// projector of random rank 1..d-1, all drawn from the stream (seed, index).
RandomSystem random_system(int dim_min, int dim_max, std::uint64_t seed, std::uint64_t index);

/// [0, 2 pi hbar d / spread(H)] with `points` samples. For d = 2 this is two
/// full Rabi periods, so the net transfer vanishes and those trials come back
/// as undefined_bound.
TimeGrid ensemble_window(const Hamiltonian& h, const UnitSystem& units, int points = 801);

struct EnsembleTrial {
  std::uint64_t index = 0;
  int dim = 0;
  int state_rank = 0;
  int projector_rank = 0;
  TrialAudit audit;
};

std::vector<EnsembleTrial> random_ensemble_audit(int dim_min, int dim_max, int count, std::uint64_t seed);

struct EnsembleSummary {
  int trials = 0;
  int audited = 0;
  int skipped_stationary = 0;
  int undefined_bound = 0;
  int chebyshev_violations = 0;
  int uniform_violations = 0;
  int time_energy_violations = 0;

  int violations() const { return chebyshev_violations + uniform_violations + time_energy_violations; }
};

EnsembleSummary summarize(const std::vector<EnsembleTrial>& trials);

}  // namespace tof
