#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tof/tf_distribution.hpp"
#include "tof/three_level.hpp"

using namespace tof;
using std::numbers::pi;

namespace {

const UnitSystem natural = UnitSystem::natural();

Hamiltonian rabi(double omega = 1.0) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.5 * omega;
  return Hamiltonian(h);
}

const DensityMatrix ground = DensityMatrix::basis(2, 0);
const Projector excited = Projector::basis(2, {1});

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g(0.0, 1.0, 11);
  CHECK(g.step() == doctest::Approx(0.1));
  CHECK(g.time(10) == 1.0);
  CHECK(g.midpoints().size() == 10);
  CHECK(g.midpoints().time(0) == doctest::Approx(0.05));
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 5), ValidationError);
  CHECK_THROWS_WITH_AS(TimeGrid(0.0, 1.0, 10), doctest::Contains(">= 11"), ValidationError);
  CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 11), ValidationError);

  CHECK(default_rule(TimeGrid(0, 1, 11)) == QuadratureRule::simpson);
  CHECK(default_rule(TimeGrid(0, 1, 12)) == QuadratureRule::trapezoid);
  // Simpson is exact on cubics.
  const TimeGrid s(0.0, 2.0, 21);
  const Eigen::VectorXd t = s.times();
  CHECK(integrate(s, QuadratureRule::simpson, t.array().cube().matrix()) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(integrate(s, QuadratureRule::trapezoid, t) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("probability trace") {
  const TimeGrid grid(0.0, pi, 101);
  const ProbabilityTrace trace = probability_trace(rabi(), ground, excited, grid, natural);
  for (int k = 0; k < grid.size(); ++k) CHECK(std::abs(trace.p(k) - std::pow(std::sin(grid.time(k) / 2), 2)) <= 1e-12);

  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  const ProbabilityTrace flat = probability_trace(Hamiltonian(z), ground, excited, grid, natural);
  CHECK(flat.p.cwiseAbs().maxCoeff() == 0.0);

  const auto h3 = three_level::build_hamiltonian({1.0, 1.0, 0.0});
  const double t_full = 2.0 * pi / std::numbers::sqrt2;
  const ProbabilityTrace p3 =
      probability_trace(h3, DensityMatrix::basis(3, 0), Projector::basis(3, {2}), TimeGrid(0.0, t_full, 11), natural);
  CHECK(p3.p(10) == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 0; k < 11; ++k) {
    const double t = p3.grid.time(k);
    CHECK(p3.p(k) == doctest::Approx(0.25 * std::pow(1.0 - std::cos(std::numbers::sqrt2 * t / 2), 2)).epsilon(1e-12));
  }
}

TEST_CASE("two-level TF distribution and statistics") {
  const TimeGrid grid(0.0, pi, 2001);
  const TfDistribution tf = tf_distribution(rabi(), ground, excited, grid, natural);
  CHECK(tf.source() == TfSource::analytic_rate);
  CHECK(tf.rule() == QuadratureRule::simpson);
  CHECK(tf.total_flow() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tf.delta_theta() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(tf.integral() - 1.0) < 1e-9);
  for (int k = 0; k < grid.size(); ++k) CHECK(std::abs(tf.density()(k) - 0.5 * std::sin(grid.time(k))) < 1e-12);

  const TimingStatistics s = timing_statistics(tf);
  CHECK(s.mean == doctest::Approx(pi / 2).epsilon(1e-10));
  CHECK(s.stddev == doctest::Approx(std::sqrt(pi * pi / 4 - 2)).epsilon(1e-9));
  CHECK(s.pi_max == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.second_moment >= s.mean * s.mean - 1e-12);

  const BoundAudit cheb = audit_chebyshev(s);
  CHECK(cheb.rhs == doctest::Approx(1.0 / (3 * std::numbers::sqrt3 * 0.5)).epsilon(1e-10));
  CHECK(cheb.passed);
  const BoundAudit uniform = audit_uniform_bound(tf, 0.5, natural);
  CHECK(uniform.lhs == doctest::Approx(1.0));
  CHECK(uniform.rhs == doctest::Approx(0.5));
  CHECK(uniform.passed);
  const BoundAudit te = audit_time_energy(s, 0.5, tf.delta_theta(), natural);
  CHECK(te.lhs == doctest::Approx(0.341833).epsilon(1e-5));
  CHECK(te.rhs == doctest::Approx(0.096225).epsilon(1e-5));
  CHECK(te.passed);
}

TEST_CASE("stationary state has no flow") {
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK_THROWS_AS(tf_distribution(Hamiltonian(z), ground, excited, TimeGrid(0, 1, 11), natural), NoFlowError);
  CHECK_THROWS_WITH(tf_distribution(Hamiltonian(z), ground, excited, TimeGrid(0, 1, 11), natural),
                    doctest::Contains("no population flow"));
}

TEST_CASE("energy shift leaves the density unchanged") {
  const TimeGrid grid(0.0, 2.0, 201);
  const TfDistribution a = tf_distribution(rabi(1.3), ground, excited, grid, natural);
  const TfDistribution b = tf_distribution(rabi(1.3).shifted(-4.2), ground, excited, grid, natural);
  CHECK((a.density() - b.density()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("statistics of symmetric and spiked densities") {
  const TimeGrid grid(-1.0, 3.0, 401);
  Eigen::VectorXd bump(grid.size());
  for (int k = 0; k < grid.size(); ++k) bump(k) = std::exp(-std::pow(grid.time(k) - 1.0, 2) / 0.1);
  const auto sym = TfDistribution::from_flow(grid, bump, 1.0, TfSource::finite_difference, QuadratureRule::simpson);
  CHECK(timing_statistics(sym).mean == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd spike = Eigen::VectorXd::Zero(grid.size());
  spike(200) = 1.0;
  const auto delta = TfDistribution::from_flow(grid, spike, 1.0, TfSource::finite_difference, QuadratureRule::trapezoid);
  CHECK(timing_statistics(delta).stddev < grid.step());
  CHECK_THROWS_AS(TfDistribution::from_flow(grid, Eigen::VectorXd::Zero(grid.size()), 0.0, TfSource::finite_difference,
                                            QuadratureRule::trapezoid),
                  NoFlowError);
}

TEST_CASE("Chebyshev gamma") {
  CHECK(chebyshev_gamma(1.0) == 0.0);
  CHECK(chebyshev_gamma(sharpest_chebyshev_k) == doctest::Approx(1.0 / (3.0 * std::numbers::sqrt3)).epsilon(1e-14));
  CHECK_THROWS_AS(chebyshev_gamma(0.5), ValidationError);
  double best_k = 1.0, best = 0.0;
  for (int i = 0; i <= 90000; ++i) {
    const double k = 1.0 + i * 1e-4;
    if (chebyshev_gamma(k) > best) best = chebyshev_gamma(k), best_k = k;
  }
  CHECK(best_k == doctest::Approx(std::numbers::sqrt3).epsilon(1e-4));

  TimingStatistics s;
  s.stddev = 0.0;
  s.pi_max = 7.0;
  CHECK(audit_chebyshev(s, 1.0).passed);
}

TEST_CASE("bound edge cases") {
  const TimeGrid grid(0.0, 2.0 * pi, 201);
  const TfDistribution full = tf_distribution(rabi(), ground, excited, grid, natural);
  CHECK(full.delta_theta() < 1e-12);
  CHECK_THROWS_AS(audit_uniform_bound(full, 0.5, natural), UndefinedBoundError);
  const BoundAudit te = audit_time_energy(timing_statistics(full), 0.5, 0.0, natural);
  CHECK(te.rhs == 0.0);
  CHECK(te.passed);

  CHECK(BoundAudit::compare(BoundKind::time_energy, 1.0, 1.0 + 5e-10).passed);
  CHECK_FALSE(BoundAudit::compare(BoundKind::time_energy, 1.0, 1.0 + 2e-9).passed);
  CHECK(to_string(BoundKind::uniform_rate) == "uniform-rate");
}

TEST_CASE("time rescaling covariance") {
  const TimeGrid grid(0.0, 2.3, 801);
  const auto h3 = three_level::build_hamiltonian({0.8, 1.4, 0.6});
  const DensityMatrix rho0 = DensityMatrix::basis(3, 0);
  const Projector m = Projector::basis(3, {2});
  const TfDistribution base = tf_distribution(h3, rho0, m, grid, natural);
  const TimingStatistics bs = timing_statistics(base);
  const double dh = std_deviation(rho0, h3.matrix());
  for (double s : {0.5, 2.0, 10.0}) {
    const Hamiltonian hs = h3.scaled(s);
    const TfDistribution tf = tf_distribution(hs, rho0, m, TimeGrid(0.0, 2.3 / s, 801), natural);
    const TimingStatistics ts = timing_statistics(tf);
    const double dhs = std_deviation(rho0, hs.matrix());
    CHECK(tf.delta_theta() == doctest::Approx(base.delta_theta()).epsilon(1e-10));
    CHECK(ts.stddev * dhs == doctest::Approx(bs.stddev * dh).epsilon(1e-9));
    CHECK(ts.stddev == doctest::Approx(bs.stddev / s).epsilon(1e-9));
    CHECK(ts.pi_max == doctest::Approx(bs.pi_max * s).epsilon(1e-9));
    CHECK(audit_chebyshev(ts).passed == audit_chebyshev(bs).passed);
    CHECK(audit_uniform_bound(tf, dhs, natural).passed == audit_uniform_bound(base, dh, natural).passed);
    CHECK(audit_time_energy(ts, dhs, tf.delta_theta(), natural).passed ==
          audit_time_energy(bs, dh, base.delta_theta(), natural).passed);
  }
}

TEST_CASE("quadrature convergence on the closed form") {
  const TimingStatistics a = timing_statistics(tf_distribution(rabi(), ground, excited, TimeGrid(0, pi, 2001), natural));
  const TimingStatistics b = timing_statistics(tf_distribution(rabi(), ground, excited, TimeGrid(0, pi, 4001), natural));
  CHECK(std::abs(a.stddev - b.stddev) / b.stddev <= 1e-6);
}

TEST_CASE("finite-difference TF agrees with the analytic rate") {
  const TimeGrid grid(0.0, pi, 2001);
  const ProbabilityTrace trace = probability_trace(rabi(), ground, excited, grid, natural);
  const TfDistribution fd = finite_difference_tf(grid, trace.p);
  CHECK(fd.grid().size() == 2000);
  CHECK(fd.source() == TfSource::finite_difference);
  CHECK(std::abs(fd.integral() - 1.0) < 1e-12);
  for (int k = 0; k < fd.grid().size(); ++k)
    CHECK(std::abs(fd.density()(k) - 0.5 * std::sin(fd.grid().time(k))) < 1e-6);
}
