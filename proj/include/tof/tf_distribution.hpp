#pragma once

// Time-of-flow distributions: the normalized magnitude of the rate at which
// population enters or leaves a measurement subspace, its moments, and the
// audits of the spread/peak/energy inequalities it obeys.

#include <cmath>
#include <numbers>
#include <string_view>

#include <Eigen/Dense>

#include "tof/quantum_core.hpp"
#include "tof/time_grid.hpp"
#include "tof/units.hpp"

namespace tof {

/// Detection probability p(t_k) = Tr(rho_t M) and its exact rate on a grid.
struct ProbabilityTrace {
  TimeGrid grid;
  Eigen::VectorXd p;
  Eigen::VectorXd rate;
  /// Natural rate scale spread(H)/hbar; rates below 1e-12 of it count as zero.
  double flow_scale = 0.0;
};

ProbabilityTrace probability_trace(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                                   const TimeGrid& grid, const UnitSystem& units);

enum class TfSource { analytic_rate, finite_difference, shot_estimate };

std::string_view to_string(TfSource source);

class TfDistribution {
 public:
  /// Normalizes |flow| so that its quadrature under `rule` is one. Throws
  /// NoFlowError when the integral vanishes.
  static TfDistribution from_flow(const TimeGrid& grid, const Eigen::VectorXd& flow, double delta_theta,
                                  TfSource source, QuadratureRule rule);

  const TimeGrid& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& density() const noexcept { return density_; }
  /// N, the factor turning |dp/dt| into a density.
  double norm_const() const noexcept { return 1.0 / total_flow_; }
  /// 1/N, the integrated |dp/dt| over the window.
  double total_flow() const noexcept { return total_flow_; }
  double delta_theta() const noexcept { return delta_theta_; }
  TfSource source() const noexcept { return source_; }
  QuadratureRule rule() const noexcept { return rule_; }
  double integral() const { return integrate(grid_, rule_, density_); }

 private:
  TfDistribution(TimeGrid grid, Eigen::VectorXd density, double total_flow, double delta_theta,
                 TfSource source, QuadratureRule rule)
      : grid_(grid),
        density_(std::move(density)),
        total_flow_(total_flow),
        delta_theta_(delta_theta),
        source_(source),
        rule_(rule) {}

  TimeGrid grid_;
  Eigen::VectorXd density_;
  double total_flow_;
  double delta_theta_;
  TfSource source_;
  QuadratureRule rule_;
};

/// TF distribution from the exact commutator rate. delta_theta = |p(tf) - p(t0)|.
TfDistribution tf_distribution(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                               const TimeGrid& grid, const UnitSystem& units);
TfDistribution tf_distribution(const ProbabilityTrace& trace);

/// TF distribution from first differences of sampled probabilities, placed at
/// cell midpoints: |p_{k+1} - p_k| / (dt * sum_l |p_{l+1} - p_l|).
TfDistribution finite_difference_tf(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p);

struct TimingStatistics {
  double mean = 0.0;
  double second_moment = 0.0;
  double stddev = 0.0;
  double pi_max = 0.0;
};

TimingStatistics timing_statistics(const TfDistribution& tf);

enum class BoundKind {
  chebyshev,         // spread >= gamma(k) / peak density
  uniform_rate,      // peak density <= 2 dH / (hbar dtheta)
  time_energy,       // spread * dH >= hbar dtheta / (6 sqrt 3)
  toa_energy,        // arrival spread >= hbar F0 / (6 sqrt 3 dH)
  toa_far_field,     // arrival spread >= hbar / (6 sqrt 3 dH)
  toa_large_width,   // arrival spread >= sqrt2/(6 sqrt3) dtheta hbar / (2 m g sigma), sigma >= sigma_c
};

std::string_view to_string(BoundKind kind);

/// One inequality lhs >= rhs, evaluated. Passing allows a relative slack of
/// 1e-9 * max(|lhs|, |rhs|, 1).
struct BoundAudit {
  BoundKind bound;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool passed = false;

  static BoundAudit compare(BoundKind bound, double lhs, double rhs);
};

inline constexpr double audit_tolerance = 1e-9;
inline constexpr double sharpest_chebyshev_k = std::numbers::sqrt3;
/// hbar / (6 sqrt 3), the time-energy constant in units of hbar.
inline constexpr double time_energy_constant = 1.0 / (6.0 * std::numbers::sqrt3);
/// Below this net transfer the rate and time-energy bounds are undefined.
inline constexpr double min_delta_theta = 1e-12;

/// gamma(k) = (k^2 - 1) / (2 k^3); maximal at k = sqrt 3 where it equals 1/(3 sqrt 3).
double chebyshev_gamma(double k);

BoundAudit audit_chebyshev(const TimingStatistics& stats, double k = sharpest_chebyshev_k);
BoundAudit audit_uniform_bound(const TfDistribution& tf, double energy_spread, const UnitSystem& units);
BoundAudit audit_time_energy(const TimingStatistics& stats, double energy_spread, double delta_theta,
                             const UnitSystem& units);

}  // namespace tof
