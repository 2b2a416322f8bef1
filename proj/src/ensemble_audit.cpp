#include "tof/ensemble_audit.hpp"

#include <numbers>
#include <random>

#include "tof/counter_rng.hpp"

namespace tof {

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::audited: return "audited";
    case TrialStatus::skipped_stationary: return "skipped-stationary";
    case TrialStatus::undefined_bound: return "undefined-bound";
  }
  return "unknown";
}

bool TrialAudit::violated() const {
  auto failed = [](const std::optional<BoundAudit>& a) { return a && !a->passed; };
  return failed(chebyshev) || failed(uniform_rate) || failed(time_energy);
}

TrialAudit audit_system(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                        const TimeGrid& grid, const UnitSystem& units) {
  TrialAudit out;
  const ProbabilityTrace trace = probability_trace(h, rho0, m, grid, units);
  std::optional<TfDistribution> tf;
  try {
    tf = tf_distribution(trace);
  } catch (const NoFlowError&) {
    out.status = TrialStatus::skipped_stationary;
    return out;
  }
  const TimingStatistics stats = timing_statistics(*tf);
  out.delta_theta = tf->delta_theta();
  out.energy_spread = std_deviation(rho0, h.matrix());
  out.chebyshev = audit_chebyshev(stats);
  if (!(out.delta_theta > min_delta_theta)) {
    out.status = TrialStatus::undefined_bound;
    return out;
  }
  out.uniform_rate = audit_uniform_bound(*tf, out.energy_spread, units);
  out.time_energy = audit_time_energy(stats, out.energy_spread, out.delta_theta, units);
  return out;
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Philox4x32& rng) {
  std::normal_distribution<double> normal;
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = {re, im};
    }
  return a;
}

Matrix random_frame(Index dim, Philox4x32& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(dim, dim, rng));
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

}  // namespace

RandomSystem random_system(int dim_min, int dim_max, std::uint64_t seed, std::uint64_t index) {
  if (dim_min < 2 || dim_max < dim_min || dim_max > 8)
    throw ValidationError("random ensemble: need 2 <= dmin <= dmax <= 8");
  Philox4x32 rng(seed, index);
  const int d = std::uniform_int_distribution<int>(dim_min, dim_max)(rng);

  const Matrix a = gaussian_matrix(d, d, rng);
  Hamiltonian h(0.5 * (a + a.adjoint()));

  const int state_rank = std::uniform_int_distribution<int>(1, d)(rng);
  const Matrix state_frame = random_frame(d, rng);
  Eigen::VectorXd weights(state_rank);
  std::exponential_distribution<double> exponential(1.0);
  for (int k = 0; k < state_rank; ++k) weights(k) = exponential(rng);
  weights /= weights.sum();
  const Matrix basis = state_frame.leftCols(state_rank);
  Matrix rho = basis * weights.cast<std::complex<double>>().asDiagonal() * basis.adjoint();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  rho /= rho.trace().real();

  const int projector_rank = std::uniform_int_distribution<int>(1, d - 1)(rng);
  const Matrix projector_frame = random_frame(d, rng);
  Matrix proj = projector_frame.leftCols(projector_rank) * projector_frame.leftCols(projector_rank).adjoint();
  proj = (0.5 * (proj + proj.adjoint())).eval();

  return {std::move(h), DensityMatrix(std::move(rho)), Projector(std::move(proj)), state_rank};
}

TimeGrid ensemble_window(const Hamiltonian& h, const UnitSystem& units, int points) {
  const double spread = spectral_decompose(h).spread();
  if (!(spread > 0.0)) throw NoFlowError("ensemble window: Hamiltonian is proportional to the identity");
  const double tf = 2.0 * std::numbers::pi * units.hbar * static_cast<double>(h.dim()) / spread;
  return TimeGrid(0.0, tf, points);
}

std::vector<EnsembleTrial> random_ensemble_audit(int dim_min, int dim_max, int count, std::uint64_t seed) {
  if (count < 1) throw ValidationError("random ensemble: count must be >= 1");
  const UnitSystem units = UnitSystem::natural();
  std::vector<EnsembleTrial> trials(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    const RandomSystem sys = random_system(dim_min, dim_max, seed, index);
    EnsembleTrial& trial = trials[static_cast<std::size_t>(i)];
    trial.index = index;
    trial.dim = static_cast<int>(sys.h.dim());
    trial.state_rank = sys.state_rank;
    trial.projector_rank = static_cast<int>(sys.m.rank());
    trial.audit = audit_system(sys.h, sys.rho0, sys.m, ensemble_window(sys.h, units), units);
  }
  return trials;
}

EnsembleSummary summarize(const std::vector<EnsembleTrial>& trials) {
  EnsembleSummary s;
  s.trials = static_cast<int>(trials.size());
  for (const auto& t : trials) {
    switch (t.audit.status) {
      case TrialStatus::audited: ++s.audited; break;
      case TrialStatus::skipped_stationary: ++s.skipped_stationary; break;
      case TrialStatus::undefined_bound: ++s.undefined_bound; break;
    }
    if (t.audit.chebyshev && !t.audit.chebyshev->passed) ++s.chebyshev_violations;
    if (t.audit.uniform_rate && !t.audit.uniform_rate->passed) ++s.uniform_violations;
    if (t.audit.time_energy && !t.audit.time_energy->passed) ++s.time_energy_violations;
  }
  return s;
}

}  // namespace tof
