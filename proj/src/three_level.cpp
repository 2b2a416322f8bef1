#include "tof/three_level.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace tof::three_level {

namespace {

DensityMatrix ground() { return DensityMatrix::basis(3, 0); }
Projector target() { return Projector::basis(3, {2}); }

}  // namespace

void Params::validate() const {
  if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(detuning))
    throw ValidationError("three-level: parameters must be finite");
  if (omega1 < 0.0 || omega2 < 0.0) throw ValidationError("three-level: Rabi frequencies must be >= 0");
  if (omega1 == 0.0 && omega2 == 0.0) throw ValidationError("three-level: omega1 and omega2 cannot both be zero");
}

Hamiltonian build_hamiltonian(const Params& p, const UnitSystem& units) {
  p.validate();
  units.validate();
  Matrix h = Matrix::Zero(3, 3);
  h(0, 1) = h(1, 0) = 0.5 * p.omega1;
  h(1, 1) = p.detuning;
  h(1, 2) = h(2, 1) = 0.5 * p.omega2;
  return Hamiltonian(units.hbar * h);
}

double generalized_rabi(const Params& p) {
  const double omega = std::sqrt(p.omega1 * p.omega1 + p.omega2 * p.omega2 + p.detuning * p.detuning);
  if (!(omega > 0.0)) throw ValidationError("three-level: zero generalized Rabi frequency, no window");
  return omega;
}

double rabi_window(const Params& p) { return 2.0 * std::numbers::pi / generalized_rabi(p); }

std::string_view to_string(Swept s) { return s == Swept::omega1 ? "omega1" : "detuning"; }

void SweepSpec::validate() const {
  if (values.empty()) throw ValidationError("sweep: values must be nonempty");
  if (!std::is_sorted(values.begin(), values.end())) throw ValidationError("sweep: values must be ascending");
  if (values.front() < 0.0) throw ValidationError("sweep: values must be >= 0");
  if (grid_points_per_period < TimeGrid::min_points)
    throw ValidationError("sweep: grid_points_per_period must be >= 11");
}

SweepSpec default_sweep(Swept swept, int points) {
  SweepSpec spec;
  spec.swept = swept;
  const double lo = swept == Swept::omega1 ? 0.1 : 0.0;
  const double hi = 5.0;
  spec.fixed = swept == Swept::omega1 ? Params{1.0, 1.0, 1.0} : Params{1.0, 1.0, 0.0};
  for (int i = 0; i < points; ++i) spec.values.push_back(lo + (hi - lo) * i / (points - 1));
  return spec;
}

Params with_value(const SweepSpec& spec, double value) {
  Params p = spec.fixed;
  (spec.swept == Swept::omega1 ? p.omega1 : p.detuning) = value;
  return p;
}

SweepRow analyze(const Params& p, double value, int grid_points, const UnitSystem& units) {
  SweepRow row;
  row.value = value;
  row.omega = generalized_rabi(p);
  row.window = rabi_window(p);
  const Hamiltonian h = build_hamiltonian(p, units);
  const DensityMatrix rho0 = ground();
  row.energy_spread = std_deviation(rho0, h.matrix());
  const TimeGrid grid(0.0, row.window, grid_points);
  const ProbabilityTrace trace = probability_trace(h, rho0, target(), grid, units);
  std::optional<TfDistribution> tf;
  try {
    tf = tf_distribution(trace);
  } catch (const NoFlowError&) {
    row.skipped = true;
    return row;
  }
  const TimingStatistics stats = timing_statistics(*tf);
  row.time_spread = stats.stddev;
  row.delta_theta = tf->delta_theta();
  const BoundAudit audit = audit_time_energy(stats, row.energy_spread, row.delta_theta, units);
  row.product = audit.lhs;
  row.bound = audit.rhs;
  row.passed = audit.passed;
  return row;
}

SweepResult uncertainty_sweep(const SweepSpec& spec, const UnitSystem& units) {
  spec.validate();
  SweepResult result{spec.swept, {}};
  result.rows.reserve(spec.values.size());
  for (double v : spec.values) {
    const Params p = with_value(spec, v);
    result.rows.push_back(analyze(p, v, spec.grid_points_per_period, units));
  }
  return result;
}

Series series(const Params& p, int grid_points, const UnitSystem& units) {
  const Hamiltonian h = build_hamiltonian(p, units);
  const TimeGrid grid(0.0, rabi_window(p), grid_points);
  const ProbabilityTrace trace = probability_trace(h, ground(), target(), grid, units);
  Eigen::VectorXd density = Eigen::VectorXd::Zero(grid.size());
  try {
    density = tf_distribution(trace).density();
  } catch (const NoFlowError&) {
  }
  return {grid, trace.p, density};
}

}  // namespace tof::three_level
