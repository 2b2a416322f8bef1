#include <doctest.h>

#include <cmath>

#include "tof/ensemble_audit.hpp"

using namespace tof;

TEST_CASE("random systems satisfy the module invariants") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const RandomSystem s = random_system(2, 8, 17, i);
    const Index d = s.h.dim();
    CHECK(d >= 2);
    CHECK(d <= 8);
    CHECK(s.rho0.dim() == d);
    CHECK(s.m.rank() >= 1);
    CHECK(s.m.rank() < d);
    CHECK(s.state_rank >= 1);
    CHECK(s.state_rank <= d);
  }
  CHECK_THROWS_AS(random_system(1, 4, 0, 0), ValidationError);
  CHECK_THROWS_AS(random_system(5, 4, 0, 0), ValidationError);
  CHECK_THROWS_AS(random_system(2, 9, 0, 0), ValidationError);
  CHECK_THROWS_AS(random_ensemble_audit(2, 4, 0, 1), ValidationError);
}

TEST_CASE("ensemble window spans d Rabi periods of the widest gap") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = -1.0;
  h(2, 2) = 1.0;
  const TimeGrid g = ensemble_window(Hamiltonian(h), UnitSystem::natural());
  CHECK(g.size() == 801);
  CHECK(g.tf() == doctest::Approx(2.0 * std::numbers::pi * 3.0 / 2.0));
}

TEST_CASE("stationary systems are skipped, not failed") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 0.3;
  h(1, 1) = -0.2;
  h(2, 2) = 1.1;
  const TrialAudit a = audit_system(Hamiltonian(h), DensityMatrix::basis(3, 1), Projector::basis(3, {0, 1}),
                                    TimeGrid(0, 10, 101), UnitSystem::natural());
  CHECK(a.status == TrialStatus::skipped_stationary);
  CHECK_FALSE(a.violated());
  CHECK_FALSE(a.chebyshev.has_value());
}

TEST_CASE("zero net transfer leaves the rate bounds undefined") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.5;
  const TrialAudit a = audit_system(Hamiltonian(h), DensityMatrix::basis(2, 0), Projector::basis(2, {1}),
                                    TimeGrid(0, 2 * std::numbers::pi, 201), UnitSystem::natural());
  CHECK(a.status == TrialStatus::undefined_bound);
  CHECK(a.chebyshev.has_value());
  CHECK_FALSE(a.uniform_rate.has_value());
}

TEST_CASE("ensemble audit: no violations, deterministic") {
  const auto trials = random_ensemble_audit(2, 8, 300, 42);
  const EnsembleSummary s = summarize(trials);
  CHECK(s.trials == 300);
  CHECK(s.violations() == 0);
  CHECK(s.audited + s.skipped_stationary + s.undefined_bound == 300);
  CHECK(s.audited > 200);

  const auto again = random_ensemble_audit(2, 8, 300, 42);
  bool identical = true;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& x = trials[i].audit;
    const auto& y = again[i].audit;
    identical = identical && x.status == y.status && x.delta_theta == y.delta_theta &&
                x.energy_spread == y.energy_spread && x.chebyshev.has_value() == y.chebyshev.has_value() &&
                (!x.chebyshev || x.chebyshev->lhs == y.chebyshev->lhs) &&
                (!x.time_energy || x.time_energy->lhs == y.time_energy->lhs);
  }
  CHECK(identical);

  // Trial i does not depend on how many trials precede or follow it.
  const auto few = random_ensemble_audit(2, 8, 10, 42);
  CHECK(few[7].audit.delta_theta == trials[7].audit.delta_theta);
}
