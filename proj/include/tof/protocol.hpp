#pragma once

// Ensemble measurement protocol: independent preparations measured once at
// each time t_k, detection counts N_k, and the TF distribution rebuilt from
// the differences of those counts.

#include <cstdint>

#include <Eigen/Dense>

#include "tof/quantum_core.hpp"
#include "tof/tf_distribution.hpp"

namespace tof {

struct ProtocolConfig {
  TimeGrid grid;
  std::int64_t shots_per_time = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Detections per time point. Sampled counts are integers; counts built from
/// exact probabilities (`expected`) may be fractional.
struct ShotCounts {
  TimeGrid grid;
  Eigen::VectorXd counts;
  double shots = 0.0;

  /// N_k = S p(t_k) with no sampling noise.
  static ShotCounts expected(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p, double shots);

  /// N_k / S, the per-time estimate of p(t_k).
  Eigen::VectorXd estimated_probability() const { return counts / shots; }
};

/// N_k ~ Binomial(S, p_k), each k drawn from its own counter stream (seed, k).
ShotCounts sample_counts(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& p, std::int64_t shots,
                         std::uint64_t seed);

ShotCounts run_protocol(const Hamiltonian& h, const DensityMatrix& rho0, const Projector& m,
                        const ProtocolConfig& cfg, const UnitSystem& units);

/// pi_hat at the midpoints t_k + dt/2: |N_{k+1} - N_k| / (dt sum_l |N_{l+1} - N_l|).
TfDistribution reconstruct_tf(const ShotCounts& counts);

/// Total-variation distance 1/2 sum |pi_hat - pi| dt, with the exact density
/// linearly interpolated onto the reconstruction's midpoints.
double protocol_error(const TfDistribution& reconstructed, const TfDistribution& exact);

}  // namespace tof
