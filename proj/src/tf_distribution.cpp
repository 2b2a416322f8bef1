#include "tof/tf_distribution.hpp"

#include <algorithm>
#include <sstream>

namespace tof {

ProbabilityTrace probability_trace(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                                   const TimeGrid& grid, const UnitSystem& units) {
  if (h.dim() != rho0.dim() || h.dim() != m.dim())
    throw ValidationError("probability trace: H, rho0 and M must share a dimension");
  const Propagator propagator(h, units);
  ProbabilityTrace trace{grid, Eigen::VectorXd(grid.size()), Eigen::VectorXd(grid.size()),
                         propagator.spectrum().spread() / units.hbar};
  for (int k = 0; k < grid.size(); ++k) {
    const DensityMatrix rho = propagator.evolve(rho0, grid.time(k));
    trace.p(k) = expectation(rho, m.matrix());
    trace.rate(k) = flow_rate(h, rho, m, units);
  }
  if (trace.p.minCoeff() < -1e-10 || trace.p.maxCoeff() > 1.0 + 1e-10)
    throw NumericalError("probability trace: detection probability left [0, 1]");
  return trace;
}

std::string_view to_string(TfSource source) {
  switch (source) {
    case TfSource::analytic_rate: return "analytic-rate";
    case TfSource::finite_difference: return "finite-difference";
    case TfSource::shot_estimate: return "shot-estimate";
  }
  return "unknown";
}

TfDistribution TfDistribution::from_flow(const TimeGrid& grid, const Eigen::VectorXd& flow,
                                         double delta_theta, TfSource source, QuadratureRule rule) {
  if (flow.size() != grid.size()) throw ValidationError("TF distribution: sample count does not match grid");
  Eigen::VectorXd magnitude = flow.cwiseAbs();
  const double total = integrate(grid, rule, magnitude);
  if (!(total > 0.0) || !std::isfinite(total)) throw NoFlowError();
  return TfDistribution(grid, magnitude / total, total, delta_theta, source, rule);
}

TfDistribution tf_distribution(const ProbabilityTrace& trace) {
  const double peak = trace.rate.cwiseAbs().maxCoeff();
  if (!(peak > 1e-12 * trace.flow_scale)) throw NoFlowError();
  const double delta_theta = std::abs(trace.p(trace.p.size() - 1) - trace.p(0));
  return TfDistribution::from_flow(trace.grid, trace.rate, std::min(delta_theta, 1.0), TfSource::analytic_rate,
                                   default_rule(trace.grid));
}

TfDistribution tf_distribution(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                               const TimeGrid& grid, const UnitSystem& units) {
  return tf_distribution(probability_trace(h, rho0, m, grid, units));
}

TfDistribution finite_difference_tf(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() != grid.size()) throw ValidationError("finite-difference TF: sample count does not match grid");
  const Eigen::Index n = p.size();
  const Eigen::VectorXd diff = p.tail(n - 1) - p.head(n - 1);
  const double delta_theta = std::abs(p(n - 1) - p(0));
  return TfDistribution::from_flow(grid.midpoints(), diff / grid.step(), delta_theta,
                                   TfSource::finite_difference, QuadratureRule::midpoint);
}

TimingStatistics timing_statistics(const TfDistribution& tf) {
  const Eigen::VectorXd w = quadrature_weights(tf.grid(), tf.rule());
  const Eigen::VectorXd t = tf.grid().times();
  const Eigen::VectorXd& pi = tf.density();
  const double mass = w.dot(pi);
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "timing statistics: density is not normalized (integral " << mass << ")";
    throw NumericalError(os.str());
  }
  TimingStatistics s;
  s.mean = w.dot(t.cwiseProduct(pi));
  s.second_moment = w.dot(t.cwiseAbs2().cwiseProduct(pi));
  // Central form; algebraically m2 - mean^2 under the same rule, without the cancellation.
  const Eigen::VectorXd centered = (t.array() - s.mean).matrix();
  const double var = w.dot(centered.cwiseAbs2().cwiseProduct(pi));
  const double scale = std::max(s.second_moment, 1e-300);
  if (var < -1e-12 * scale) throw NumericalError("timing statistics: negative variance");
  s.stddev = std::sqrt(std::max(var, 0.0));
  s.pi_max = pi.maxCoeff();
  return s;
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::chebyshev: return "chebyshev";
    case BoundKind::uniform_rate: return "uniform-rate";
    case BoundKind::time_energy: return "time-energy";
    case BoundKind::toa_energy: return "toa-energy";
    case BoundKind::toa_far_field: return "toa-far-field";
    case BoundKind::toa_large_width: return "toa-large-width";
  }
  return "unknown";
}

BoundAudit BoundAudit::compare(BoundKind bound, double lhs, double rhs) {
  BoundAudit a{bound, lhs, rhs, lhs - rhs, false};
  const double slack = audit_tolerance * std::max({std::abs(lhs), std::abs(rhs), 1.0});
  a.passed = a.margin >= -slack;
  return a;
}

double chebyshev_gamma(double k) {
  if (!(k >= 1.0)) throw ValidationError("Chebyshev bound: k must be >= 1");
  return (k * k - 1.0) / (2.0 * k * k * k);
}

BoundAudit audit_chebyshev(const TimingStatistics& stats, double k) {
  const double gamma = chebyshev_gamma(k);
  if (!(stats.pi_max > 0.0)) throw ValidationError("Chebyshev bound: peak density must be positive");
  return BoundAudit::compare(BoundKind::chebyshev, stats.stddev, gamma / stats.pi_max);
}

BoundAudit audit_uniform_bound(const TfDistribution& tf, double energy_spread, const UnitSystem& units) {
  units.validate();
  if (energy_spread < 0.0) throw ValidationError("uniform bound: energy spread must be nonnegative");
  if (!(tf.delta_theta() > min_delta_theta))
    throw UndefinedBoundError("uniform bound: undefined for zero net population transfer");
  const double ceiling = 2.0 * energy_spread / (units.hbar * tf.delta_theta());
  return BoundAudit::compare(BoundKind::uniform_rate, ceiling, tf.density().maxCoeff());
}

BoundAudit audit_time_energy(const TimingStatistics& stats, double energy_spread, double delta_theta,
                             const UnitSystem& units) {
  units.validate();
  if (energy_spread < 0.0) throw ValidationError("time-energy bound: energy spread must be nonnegative");
  if (delta_theta < 0.0) throw ValidationError("time-energy bound: delta theta must be nonnegative");
  return BoundAudit::compare(BoundKind::time_energy, stats.stddev * energy_spread,
                             time_energy_constant * units.hbar * delta_theta);
}

}  // namespace tof
