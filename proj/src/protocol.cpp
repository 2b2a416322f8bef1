#include "tof/protocol.hpp"

#include <algorithm>
#include <random>

#include "tof/counter_rng.hpp"

namespace tof {

void ProtocolConfig::validate() const {
  if (shots_per_time < 1) throw ValidationError("protocol: shots_per_time must be >= 1");
}

ShotCounts ShotCounts::expected(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p, double shots) {
  if (p.size() != grid.size()) throw ValidationError("shot counts: sample count does not match grid");
  if (!(shots > 0.0)) throw ValidationError("shot counts: shots must be positive");
  return {grid, shots * p, shots};
}

ShotCounts sample_counts(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p, std::int64_t shots,
                         std::uint64_t seed) {
  if (p.size() != grid.size()) throw ValidationError("protocol: probability count does not match grid");
  if (shots < 1) throw ValidationError("protocol: shots_per_time must be >= 1");
  ShotCounts out{grid, Eigen::VectorXd(grid.size()), static_cast<double>(shots)};
  for (int k = 0; k < grid.size(); ++k) {
    if (p(k) < -1e-10 || p(k) > 1.0 + 1e-10)
      throw NumericalError("protocol: detection probability outside [0, 1]");
    const double prob = std::clamp(p(k), 0.0, 1.0);
    Philox4x32 rng(seed, static_cast<std::uint64_t>(k));
    std::binomial_distribution<std::int64_t> binomial(shots, prob);
    out.counts(k) = static_cast<double>(binomial(rng));
  }
  return out;
}

ShotCounts run_protocol(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                        const ProtocolConfig& cfg, const UnitSystem& units) {
  cfg.validate();
  const ProbabilityTrace trace = probability_trace(h, rho0, m, cfg.grid, units);
  return sample_counts(cfg.grid, trace.p, cfg.shots_per_time, cfg.seed);
}

TfDistribution reconstruct_tf(const ShotCounts& counts) {
  const Eigen::Index n = counts.counts.size();
  const Eigen::VectorXd diff = counts.counts.tail(n - 1) - counts.counts.head(n - 1);
  if (diff.cwiseAbs().sum() == 0.0) throw NoFlowError("no detected flow: all count differences are zero");
  const double delta_theta = std::abs(counts.counts(n - 1) - counts.counts(0)) / counts.shots;
  return TfDistribution::from_flow(counts.grid.midpoints(), diff / counts.grid.step(), std::min(delta_theta, 1.0),
                                   TfSource::shot_estimate, QuadratureRule::midpoint);
}

double protocol_error(const TfDistribution& reconstructed, const TfDistribution& exact) {
  const TimeGrid& rg = reconstructed.grid();
  const TimeGrid& eg = exact.grid();
  const double slack = 1e-9 * eg.step();
  if (rg.t0() < eg.t0() - slack || rg.tf() > eg.tf() + slack)
    throw ValidationError("protocol error: reconstruction grid extends beyond the exact distribution");
  const Eigen::VectorXd& pe = exact.density();
  double distance = 0.0;
  for (int k = 0; k < rg.size(); ++k) {
    const double u = std::clamp((rg.time(k) - eg.t0()) / eg.step(), 0.0, static_cast<double>(eg.size() - 1));
    const int i = std::min(static_cast<int>(u), eg.size() - 2);
    const double frac = u - i;
    const double interp = (1.0 - frac) * pe(i) + frac * pe(i + 1);
    distance += std::abs(reconstructed.density()(k) - interp) * rg.step();
  }
  return std::clamp(0.5 * distance, 0.0, 1.0);
}

}  // namespace tof
