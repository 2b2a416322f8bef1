#include "tof/matterwave.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace tof::matterwave {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

void require_fall(const ParticleSpec& spec, double detector_x) {
  spec.validate();
  if (!(spec.g > 0.0)) throw ValidationError("time of arrival: g must be positive");
  if (!(detector_x > 0.0)) throw ValidationError("time of arrival: detector must sit below the start, x_d > 0");
}

// Largest density over the `band` outermost points on either side.
double edge_density(const Eigen::VectorXcd& psi, int band) {
  return std::max(psi.head(band).cwiseAbs2().maxCoeff(), psi.tail(band).cwiseAbs2().maxCoeff());
}

constexpr double leak_threshold = 1e-10;
constexpr int edge_band = 8;

}  // namespace

const Species& find_species(std::string_view name) {
  if (iequals(name, "hbar") || iequals(name, "h-bar") || iequals(name, "anti-hydrogen")) return species_table[0];
  for (const auto& s : species_table)
    if (iequals(name, s.name)) return s;
  throw ValidationError("unknown species '" + std::string(name) + "'");
}

void ParticleSpec::validate() const {
  if (!(mass > 0.0) || !(sigma > 0.0) || !(hbar > 0.0))
    throw ValidationError("particle: mass, sigma and hbar must be positive");
  if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("particle: g must be finite and nonnegative");
}

NaturalScales NaturalScales::of(const ParticleSpec& spec) {
  spec.validate();
  if (!(spec.g > 0.0)) throw ValidationError("natural scales need g > 0");
  const double m = spec.mass, g = spec.g, hbar = spec.hbar;
  return {std::cbrt(hbar * hbar / (2.0 * m * m * g)), std::cbrt(2.0 * hbar / (m * g * g))};
}

ParticleSpec NaturalScales::nondimensional(const ParticleSpec& spec) const {
  return {0.5, 2.0, spec.sigma / length, 1.0};
}

AnalyticPacket::AnalyticPacket(const ParticleSpec& spec) : spec_(spec) { spec_.validate(); }

double AnalyticPacket::width(double t) const {
  const double s2 = spec_.sigma * spec_.sigma;
  const double a = spec_.hbar * t / (2.0 * spec_.mass * s2);
  return spec_.sigma * std::sqrt(1.0 + a * a);
}

double AnalyticPacket::density(double x, double t) const {
  const double w = width(t);
  const double z = (x - center(t)) / w;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * w);
}

double AnalyticPacket::current(double x, double t) const {
  const double w = width(t);
  const double m = spec_.mass;
  const double stretch = spec_.hbar * spec_.hbar * t / (4.0 * m * m * spec_.sigma * spec_.sigma * w * w);
  return density(x, t) * (spec_.g * t + stretch * (x - center(t)));
}

double AnalyticPacket::cumulative(double x, double t) const {
  return 0.5 * std::erfc(-(x - center(t)) / (std::numbers::sqrt2 * width(t)));
}

Observables analytic_observables(const ParticleSpec& spec, double x, double t) {
  if (t < 0.0) throw ValidationError("analytic observables: t must be >= 0");
  const AnalyticPacket packet(spec);
  return {packet.density(x, t), packet.current(x, t)};
}

Eigen::VectorXd Grid1D::points() const { return Eigen::VectorXd::LinSpaced(n_x, x_min, x_max); }

void Grid1D::validate(const ParticleSpec& spec) const {
  if (!(x_max > x_min)) throw ValidationError("grid: need x_min < x_max");
  if (n_x < min_points) throw ValidationError("grid: need at least 256 points");
  const double cap = spec.mass * dx() * dx() / spec.hbar;
  if (!(dt > 0.0) || dt > cap * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "grid: time step " << dt << " outside (0, m dx^2 / hbar = " << cap << "]";
    throw ValidationError(os.str());
  }
}

Grid1D auto_grid(const ParticleSpec& spec, double t_final, int n_x) {
  spec.validate();
  const AnalyticPacket packet(spec);
  const double margin = 12.0 * std::max(spec.sigma, packet.width(t_final));
  Grid1D grid{std::min(0.0, packet.center(t_final)) - margin, std::max(0.0, packet.center(t_final)) + margin, n_x,
              0.0};
  grid.dt = spec.mass * grid.dx() * grid.dx() / spec.hbar;
  return grid;
}

GridState gaussian_state(const ParticleSpec& spec, const Grid1D& grid) {
  spec.validate();
  GridState state{Eigen::VectorXcd(grid.n_x), 0.0};
  const double s2 = spec.sigma * spec.sigma;
  for (int i = 0; i < grid.n_x; ++i) {
    const double x = grid.x(i);
    state.psi(i) = std::exp(-x * x / (4.0 * s2));
  }
  state.psi /= std::sqrt(norm(state, grid));
  if (edge_density(state.psi, edge_band) > 1e-12)
    throw DomainTooSmallError("grid: initial packet reaches the domain edge");
  return state;
}

double norm(const GridState& state, const Grid1D& grid) { return state.psi.squaredNorm() * grid.dx(); }

Eigen::VectorXd density(const GridState& state) { return state.psi.cwiseAbs2(); }

Eigen::VectorXd current(const GridState& state, const ParticleSpec& spec, const Grid1D& grid) {
  const Eigen::VectorXcd& psi = state.psi;
  const int n = static_cast<int>(psi.size());
  const double h = grid.dx();
  Eigen::VectorXd j = Eigen::VectorXd::Zero(n);
  for (int i = 2; i < n - 2; ++i) {
    const cd dpsi = (-psi(i + 2) + 8.0 * psi(i + 1) - 8.0 * psi(i - 1) + psi(i - 2)) / (12.0 * h);
    j(i) = spec.hbar / spec.mass * (std::conj(psi(i)) * dpsi).imag();
  }
  return j;
}

double mean_position(const GridState& state, const Grid1D& grid) {
  return grid.points().dot(density(state)) * grid.dx();
}

CrankNicolson::CrankNicolson(const ParticleSpec& spec, const Grid1D& grid, double dt) : dt_(dt) {
  spec.validate();
  if (!(dt > 0.0)) throw ValidationError("Crank-Nicolson: dt must be positive");
  const int n = grid.n_x;
  const double c = spec.hbar * spec.hbar / (2.0 * spec.mass * grid.dx() * grid.dx());
  const double tau = dt / (2.0 * spec.hbar);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = -spec.mass * spec.g * grid.x(i);

  // B = tridiag(1, 10, 1)/12 and A = -c tridiag(1, -2, 1) + B diag(V);
  // lhs = B + i tau A, rhs = B - i tau A.
  Eigen::VectorXcd lhs_diag(n), lhs_sup(n);
  lhs_sub_.resize(n);
  rhs_sub_.resize(n);
  rhs_diag_.resize(n);
  rhs_sup_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a_diag = 2.0 * c + 10.0 * v(i) / 12.0;
    const double a_sub = i > 0 ? -c + v(i - 1) / 12.0 : 0.0;
    const double a_sup = i < n - 1 ? -c + v(i + 1) / 12.0 : 0.0;
    const double b_off = 1.0 / 12.0;
    lhs_diag(i) = 10.0 / 12.0 + I * tau * a_diag;
    rhs_diag_(i) = 10.0 / 12.0 - I * tau * a_diag;
    lhs_sub_(i) = i > 0 ? b_off + I * tau * a_sub : cd{};
    rhs_sub_(i) = i > 0 ? b_off - I * tau * a_sub : cd{};
    lhs_sup(i) = i < n - 1 ? b_off + I * tau * a_sup : cd{};
    rhs_sup_(i) = i < n - 1 ? b_off - I * tau * a_sup : cd{};
  }

  // Thomas elimination of the constant left-hand matrix, done once.
  sweep_upper_.resize(n);
  sweep_inv_.resize(n);
  sweep_inv_(0) = 1.0 / lhs_diag(0);
  sweep_upper_(0) = lhs_sup(0) * sweep_inv_(0);
  for (int i = 1; i < n; ++i) {
    sweep_inv_(i) = 1.0 / (lhs_diag(i) - lhs_sub_(i) * sweep_upper_(i - 1));
    sweep_upper_(i) = lhs_sup(i) * sweep_inv_(i);
  }
}

void CrankNicolson::step(Eigen::VectorXcd& psi) const {
  const auto n = psi.size();
  Eigen::VectorXcd rhs(n);
  rhs(0) = rhs_diag_(0) * psi(0) + rhs_sup_(0) * psi(1);
  for (Eigen::Index i = 1; i < n - 1; ++i)
    rhs(i) = rhs_sub_(i) * psi(i - 1) + rhs_diag_(i) * psi(i) + rhs_sup_(i) * psi(i + 1);
  rhs(n - 1) = rhs_sub_(n - 1) * psi(n - 2) + rhs_diag_(n - 1) * psi(n - 1);

  rhs(0) *= sweep_inv_(0);
  for (Eigen::Index i = 1; i < n; ++i) rhs(i) = (rhs(i) - lhs_sub_(i) * rhs(i - 1)) * sweep_inv_(i);
  psi(n - 1) = rhs(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) psi(i) = rhs(i) - sweep_upper_(i) * psi(i + 1);
}

namespace {

void advance(const CrankNicolson& cn, GridState& state, long steps) {
  for (long s = 0; s < steps; ++s) {
    cn.step(state.psi);
    state.time += cn.dt();
    if (s % 64 == 63 && edge_density(state.psi, edge_band) > leak_threshold)
      throw DomainTooSmallError("grid: density reached the domain edge; widen the domain");
  }
  if (edge_density(state.psi, edge_band) > leak_threshold)
    throw DomainTooSmallError("grid: density reached the domain edge; widen the domain");
}

long steps_for(double span, double dt_cap) { return std::max(1L, static_cast<long>(std::ceil(span / dt_cap - 1e-9))); }

}  // namespace

GridState grid_evolve(const ParticleSpec& spec, const Grid1D& grid, const GridState& psi0, double t_final) {
  grid.validate(spec);
  if (psi0.psi.size() != grid.n_x) throw ValidationError("grid evolve: state size does not match grid");
  if (std::abs(norm(psi0, grid) - 1.0) > 1e-8) throw ValidationError("grid evolve: initial state not normalized");
  if (t_final < psi0.time) throw ValidationError("grid evolve: t_final precedes the state's time");
  GridState state = psi0;
  if (t_final == psi0.time) return state;
  const long steps = steps_for(t_final - psi0.time, grid.dt);
  const CrankNicolson cn(spec, grid, (t_final - psi0.time) / static_cast<double>(steps));
  advance(cn, state, steps);
  state.time = t_final;
  return state;
}

HalfSpaceTf half_space_tf(const ParticleSpec& spec, double detector_x, const TimeGrid& times, int n_x) {
  require_fall(spec, detector_x);
  if (times.t0() < 0.0) throw ValidationError("half-space TF: times must be >= 0");
  Grid1D grid = auto_grid(spec, times.tf(), n_x);
  // Put detector_x halfway between two nodes so the projector is a clean partial sum.
  const double h = grid.dx();
  const double cells = std::round((detector_x - grid.x_min) / h - 0.5);
  grid.x_min = detector_x - (cells + 0.5) * h;
  grid.x_max = grid.x_min + (grid.n_x - 1) * h;
  grid.validate(spec);
  const int inside = static_cast<int>(cells) + 1;
  if (inside < 1 || inside >= grid.n_x) throw ValidationError("half-space TF: detector outside the grid");

  GridState state = gaussian_state(spec, grid);
  if (times.t0() > 0.0) state = grid_evolve(spec, grid, state, times.t0());
  const long sub = steps_for(times.step(), grid.dt);
  const CrankNicolson cn(spec, grid, times.step() / static_cast<double>(sub));

  Eigen::VectorXd f(times.size());
  for (int k = 0; k < times.size(); ++k) {
    if (k > 0) advance(cn, state, sub);
    f(k) = state.psi.head(inside).squaredNorm() * h;
  }
  return {f, finite_difference_tf(times, f)};
}

TimeGrid toa_window(const ParticleSpec& spec, double detector_x) {
  require_fall(spec, detector_x);
  const AnalyticPacket packet(spec);
  const double t_cl = std::sqrt(2.0 * detector_x / spec.g);
  double tf = 2.0 * t_cl;
  for (int i = 0; i < 200 && packet.cumulative(detector_x, tf) > 1e-6; ++i) tf *= 1.25;
  // Arrival spread estimate: packet width over the classical speed at x_d.
  const double spread = packet.width(t_cl) / (spec.g * t_cl);
  const double dt = std::min(spread, t_cl) / 50.0;
  long n = static_cast<long>(std::ceil(tf / dt)) + 1;
  n = std::clamp(n, 2001L, 400001L);
  if (n % 2 == 0) ++n;
  return TimeGrid(0.0, tf, static_cast<int>(n));
}

ToaDistribution toa_distribution(const ParticleSpec& spec, double detector_x, const TimeGrid& grid) {
  require_fall(spec, detector_x);
  if (grid.t0() < 0.0) throw ValidationError("time of arrival: window must start at t >= 0");
  const AnalyticPacket packet(spec);
  const double remaining = packet.cumulative(detector_x, grid.tf());
  if (remaining > 1e-3) {
    std::ostringstream os;
    os << "time of arrival: window too short, F(x_d) = " << remaining << " at the final time";
    throw WindowTooShortError(os.str());
  }
  Eigen::VectorXd j(grid.size());
  for (int k = 0; k < grid.size(); ++k) j(k) = packet.current(detector_x, grid.time(k));
  TfDistribution tf = TfDistribution::from_flow(grid, j, packet.cumulative(detector_x, 0.0), TfSource::analytic_rate,
                                                default_rule(grid));
  const TimingStatistics stats = timing_statistics(tf);
  return {detector_x, std::move(j), std::move(tf), stats};
}

EnergySpread energy_spread_parts(const ParticleSpec& spec) {
  spec.validate();
  const double kinetic = spec.hbar * spec.hbar / (4.0 * std::numbers::sqrt2 * spec.mass * spec.sigma * spec.sigma);
  const double potential = spec.mass * spec.g * spec.sigma;
  return {kinetic, potential, std::hypot(kinetic, potential)};
}

double energy_spread(const ParticleSpec& spec) {
  spec.validate();
  const double m = spec.mass, g = spec.g, s = spec.sigma, hbar = spec.hbar;
  if (g == 0.0) return energy_spread_parts(spec).kinetic;
  const double correction = std::pow(hbar, 4) / (32.0 * g * g * std::pow(m, 4) * std::pow(s, 6));
  return m * g * s * std::sqrt(1.0 + correction);
}

double sigma_c(const ParticleSpec& spec) {
  spec.validate();
  if (!(spec.g > 0.0)) throw ValidationError("sigma_c: g must be positive");
  return std::cbrt(spec.hbar * spec.hbar / (4.0 * std::numbers::sqrt2 * spec.mass * spec.mass * spec.g));
}

std::vector<BoundAudit> toa_bounds(const ToaDistribution& toa, const ParticleSpec& spec) {
  const double dH = energy_spread(spec);
  const double spread = toa.stats.stddev;
  const double f0 = toa.tf.delta_theta();
  std::vector<BoundAudit> out;
  out.push_back(BoundAudit::compare(BoundKind::toa_energy, spread, time_energy_constant * spec.hbar * f0 / dH));
  out.push_back(BoundAudit::compare(BoundKind::toa_far_field, spread, time_energy_constant * spec.hbar / dH));
  if (spec.sigma >= sigma_c(spec)) {
    const double rhs =
        std::numbers::sqrt2 * time_energy_constant * f0 * spec.hbar / (2.0 * spec.mass * spec.g * spec.sigma);
    out.push_back(BoundAudit::compare(BoundKind::toa_large_width, spread, rhs));
  }
  return out;
}

std::vector<BoundAudit> toa_bounds(const ParticleSpec& spec, double detector_x) {
  return toa_bounds(toa_distribution(spec, detector_x, toa_window(spec, detector_x)), spec);
}

std::vector<SpeciesRow> table1(double g) {
  std::vector<SpeciesRow> rows;
  for (const auto& s : species_table) {
    const ParticleSpec spec{s.mass, g, table_sigma, hbar_si};
    rows.push_back({std::string(s.name), s.mass, sigma_c(spec),
                    time_energy_constant * hbar_si / energy_spread(spec)});
  }
  return rows;
}

}  // namespace tof::matterwave
