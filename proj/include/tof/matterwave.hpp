#pragma once

// Time of arrival for a Gaussian wavepacket falling from rest in a uniform
// field. Coordinates point along the fall: V(x) = -m g x, the packet starts
// centered at x = 0 and a detector sits at x_d > 0.
//
// ParticleSpec carries its own hbar, so the same code runs in SI and in the
// natural units of the problem (see NaturalScales).

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tof/tf_distribution.hpp"

namespace tof::matterwave {

inline constexpr double hbar_si = 1.054571817e-34;
inline constexpr double g_earth = 9.81;

struct Species {
  std::string_view name;
  double mass;  // kg
};

inline constexpr std::array<Species, 4> species_table{{
    {"antihydrogen", 1.6735e-27},
    {"K-39", 6.4703e-26},
    {"Rb-87", 1.44316e-25},
    {"Cs-133", 2.20695e-25},
}};

/// Case-insensitive lookup; "Hbar" and "H-bar" name antihydrogen.
const Species& find_species(std::string_view name);

struct ParticleSpec {
  double mass = 0.0;
  double g = g_earth;
  double sigma = 0.0;  // initial position standard deviation
  double hbar = hbar_si;

  void validate() const;
};

/// Length (hbar^2 / (2 m^2 g))^(1/3) and time (2 hbar / (m g^2))^(1/3). In
/// these units hbar = 1, m = 1/2 and g = 2, so i dpsi/dt = -psi'' - x psi.
struct NaturalScales {
  double length = 1.0;
  double time = 1.0;

  static NaturalScales of(const ParticleSpec& spec);
  ParticleSpec nondimensional(const ParticleSpec& spec) const;
};

/// Closed-form density and current of the freely falling Gaussian.
class AnalyticPacket {
 public:
  explicit AnalyticPacket(const ParticleSpec& spec);

  double center(double t) const { return 0.5 * spec_.g * t * t; }
  /// sigma sqrt(1 + hbar^2 t^2 / (4 m^2 sigma^4)).
  double width(double t) const;
  double density(double x, double t) const;
  double current(double x, double t) const;
  /// F_t(x), the probability of finding the particle in (-inf, x].
  double cumulative(double x, double t) const;

  const ParticleSpec& spec() const noexcept { return spec_; }

 private:
  ParticleSpec spec_;
};

struct Observables {
  double density;
  double current;
};

Observables analytic_observables(const ParticleSpec& spec, double x, double t);

struct Grid1D {
  static constexpr int min_points = 256;

  double x_min = 0.0;
  double x_max = 0.0;
  int n_x = 0;
  double dt = 0.0;

  double dx() const { return (x_max - x_min) / (n_x - 1); }
  double x(int i) const { return x_min + i * dx(); }
  Eigen::VectorXd points() const;

  /// Ordering, size, and the step cap dt <= m dx^2 / hbar.
  void validate(const ParticleSpec& spec) const;
};

/// Spans center +/- 12 widths over [0, t_final] with the largest allowed dt.
Grid1D auto_grid(const ParticleSpec& spec, double t_final, int n_x);

struct GridState {
  Eigen::VectorXcd psi;
  double time = 0.0;
};

/// psi ∝ exp(-x^2 / (4 sigma^2)), normalized on the grid.
GridState gaussian_state(const ParticleSpec& spec, const Grid1D& grid);

double norm(const GridState& state, const Grid1D& grid);
Eigen::VectorXd density(const GridState& state);
/// (hbar/m) Im(conj(psi) dpsi/dx) with fourth-order differences.
Eigen::VectorXd current(const GridState& state, const ParticleSpec& spec, const Grid1D& grid);
double mean_position(const GridState& state, const Grid1D& grid);

/// Crank-Nicolson stepper with a fourth-order compact (Numerov) kinetic term.
/// The propagator is (1 + i dt H / 2hbar)^-1 (1 - i dt H / 2hbar) with a
/// Hermitian H, so the discrete norm is conserved to round-off. Each step is a
/// single tridiagonal solve. Dirichlet walls at both ends.
class CrankNicolson {
 public:
  CrankNicolson(const ParticleSpec& spec, const Grid1D& grid, double dt);

  void step(Eigen::VectorXcd& psi) const;
  double dt() const noexcept { return dt_; }

 private:
  double dt_;
  Eigen::VectorXcd lhs_sub_, rhs_sub_, rhs_diag_, rhs_sup_;
  Eigen::VectorXcd sweep_upper_, sweep_inv_;
};

/// Evolves psi0 to t_final. Throws DomainTooSmallError if density reaches the
/// walls.
GridState grid_evolve(const ParticleSpec& spec, const Grid1D& grid, const GridState& psi0, double t_final);

/// TF distribution of the half-space projector onto x <= detector_x, computed
/// on the grid oracle: F(t_k) is sampled along the Crank-Nicolson trajectory
/// and differenced (finite_difference_tf). The grid is shifted so the detector
/// falls on a cell boundary.
struct HalfSpaceTf {
  Eigen::VectorXd cumulative;  // F at the grid times
  TfDistribution tf;
};

HalfSpaceTf half_space_tf(const ParticleSpec& spec, double detector_x, const TimeGrid& grid, int n_x = 4096);

struct ToaDistribution {
  double detector_x;
  Eigen::VectorXd current;  // j(x_d, t_k)
  TfDistribution tf;        // delta_theta = F_0(x_d)
  TimingStatistics stats;
};

/// [0, t_f] with t_f such that F_{t_f}(x_d) <= 1e-6 and a step resolving the
/// arrival peak.
TimeGrid toa_window(const ParticleSpec& spec, double detector_x);

/// pi_x(t) = |j(x_d, t)| / integral |j|. Throws WindowTooShortError when more
/// than 1e-3 of the packet has yet to cross at the end of the window.
ToaDistribution toa_distribution(const ParticleSpec& spec, double detector_x, const TimeGrid& grid);

struct EnergySpread {
  double kinetic;    // hbar^2 / (4 sqrt2 m sigma^2)
  double potential;  // m g sigma
  double total;      // sqrt(kinetic^2 + potential^2)
};

EnergySpread energy_spread_parts(const ParticleSpec& spec);

/// m g sigma sqrt(1 + hbar^4 / (32 g^2 m^4 sigma^6)).
double energy_spread(const ParticleSpec& spec);

/// (hbar^2 / (4 sqrt2 m^2 g))^(1/3), where kinetic and potential spreads agree.
double sigma_c(const ParticleSpec& spec);

/// The three arrival-time lower bounds, lhs = measured spread of the TOA
/// distribution. The large-width bound is only emitted for sigma >= sigma_c.
std::vector<BoundAudit> toa_bounds(const ToaDistribution& toa, const ParticleSpec& spec);
std::vector<BoundAudit> toa_bounds(const ParticleSpec& spec, double detector_x);

/// Width at which the tabulated minimal arrival spreads are evaluated.
inline constexpr double table_sigma = 1e-6;

struct SpeciesRow {
  std::string name;
  double mass;      // kg
  double sigma_c;   // m
  double dt_min;    // s, hbar / (6 sqrt3 dH) at sigma = table_sigma
};

std::vector<SpeciesRow> table1(double g = g_earth);

}  // namespace tof::matterwave
