#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tof/counter_rng.hpp"
#include "tof/quantum_core.hpp"
#include "tof/three_level.hpp"

using namespace tof;

namespace {

const UnitSystem natural = UnitSystem::natural();

Hamiltonian rabi(double omega = 1.0) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.5 * omega;
  return Hamiltonian(h);
}

Matrix gaussian(Index d, Philox4x32& rng) {
  std::normal_distribution<double> n;
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      const double re = n(rng);
      a(i, j) = {re, n(rng)};
    }
  return a;
}

struct Triple {
  Hamiltonian h;
  DensityMatrix rho;
  Projector m;
};

Triple random_triple(Index d, Philox4x32& rng) {
  const Matrix a = gaussian(d, rng);
  Hamiltonian h(0.5 * (a + a.adjoint()));
  const Matrix b = gaussian(d, rng);
  Matrix rho = b * b.adjoint();
  rho /= rho.trace().real();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  Eigen::HouseholderQR<Matrix> qr(gaussian(d, rng));
  const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Index r = 1 + static_cast<Index>(rng() % static_cast<std::uint32_t>(d - 1));
  Matrix m = q.leftCols(r) * q.leftCols(r).adjoint();
  m = (0.5 * (m + m.adjoint())).eval();
  return {std::move(h), DensityMatrix(rho), Projector(m)};
}

}  // namespace

TEST_CASE("operators reject invariant violations") {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(Hamiltonian{h}, ValidationError);
  CHECK_THROWS_AS(Hamiltonian{Matrix::Zero(2, 3)}, ValidationError);
  Matrix nan = Matrix::Zero(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(Hamiltonian{nan}, ValidationError);

  Matrix tiny = Matrix::Zero(2, 2);
  tiny(0, 1) = {0.0, 5e-13};
  tiny(1, 0) = {0.0, -4e-13};
  CHECK_NOTHROW(Hamiltonian{tiny});

  CHECK_THROWS_AS(DensityMatrix{Matrix::Identity(2, 2)}, ValidationError);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, ValidationError);

  CHECK_THROWS_AS(Projector{Matrix::Identity(3, 3)}, ValidationError);  // rank d
  CHECK_THROWS_AS(Projector{Matrix::Zero(3, 3)}, ValidationError);      // rank 0
  CHECK_THROWS_AS(Projector{0.5 * Matrix::Identity(3, 3)}, ValidationError);
  CHECK(Projector::basis(4, {1, 3}).rank() == 2);
}

TEST_CASE("spectral decomposition") {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto sx = spectral_decompose(Hamiltonian(x));
  CHECK(sx.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(sx.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));

  const auto id = spectral_decompose(Hamiltonian(Matrix::Identity(3, 3)));
  for (int k = 0; k < 3; ++k) CHECK(id.eigenvalues(k) == doctest::Approx(1.0));
  CHECK(id.spread() == doctest::Approx(0.0));

  const auto three = spectral_decompose(three_level::build_hamiltonian({1.0, 1.0, 0.0}));
  CHECK(three.eigenvalues(0) == doctest::Approx(-std::numbers::sqrt2 / 2).epsilon(1e-12));
  CHECK(std::abs(three.eigenvalues(1)) < 1e-12);
  CHECK(three.eigenvalues(2) == doctest::Approx(std::numbers::sqrt2 / 2).epsilon(1e-12));

  Philox4x32 rng(3, 0);
  for (Index d = 2; d <= 8; ++d) {
    const Matrix a = gaussian(d, rng);
    const Hamiltonian h(0.5 * (a + a.adjoint()));
    const auto s = spectral_decompose(h);
    const Matrix u = s.eigenvectors;
    CHECK((u.adjoint() * u - Matrix::Identity(d, d)).norm() < 1e-10);
    CHECK((s.reconstruct() - h.matrix()).norm() / h.matrix().norm() < 1e-10);
    for (Index k = 1; k < d; ++k) CHECK(s.eigenvalues(k) >= s.eigenvalues(k - 1));
  }
}

TEST_CASE("exact evolution: Rabi closed form and stationarity") {
  const Hamiltonian h = rabi();
  const DensityMatrix rho0 = DensityMatrix::basis(2, 0);
  const Matrix excited = Projector::basis(2, {1}).matrix();
  for (double t : {0.0, 0.3, 1.0, std::numbers::pi / 2, 2.5, std::numbers::pi}) {
    const DensityMatrix rho = evolve(h, rho0, t, natural);
    CHECK(std::abs(expectation(rho, excited) - std::pow(std::sin(t / 2), 2)) < 1e-14);
  }
  CHECK(expectation(evolve(h, rho0, std::numbers::pi / 2, natural), excited) == doctest::Approx(0.5));
  CHECK((evolve(h, rho0, 0.0, natural).matrix() - rho0.matrix()).norm() == 0.0);

  // rho0 diagonal in the eigenbasis of H does not move.
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const DensityMatrix mixed = DensityMatrix(Matrix(Eigen::Vector2cd(0.7, 0.3).asDiagonal()));
  CHECK((evolve(Hamiltonian(z), mixed, 4.2, natural).matrix() - mixed.matrix()).norm() < 1e-14);

  CHECK_THROWS_AS(evolve(h, rho0, -1.0, natural), ValidationError);
  CHECK_THROWS_AS(evolve(h, DensityMatrix::basis(3, 0), 1.0, natural), ValidationError);
}

TEST_CASE("expectation and variance") {
  const Projector m = Projector::basis(4, {0, 2, 3});
  CHECK(expectation(DensityMatrix::maximally_mixed(4), m.matrix()) == doctest::Approx(0.75));
  CHECK(expectation(DensityMatrix::basis(2, 0), Projector::basis(2, {1}).matrix()) == 0.0);

  Matrix notherm = Matrix::Zero(2, 2);
  notherm(0, 1) = 1.0;
  CHECK_THROWS_AS(expectation(DensityMatrix::basis(2, 0), notherm), ValidationError);

  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK(variance(DensityMatrix::basis(2, 1), z) == 0.0);

  const DensityMatrix ground = DensityMatrix::basis(3, 0);
  for (double w1 : {0.2, 1.0, 3.7})
    for (double w2 : {0.0, 1.0, 2.0})
      for (double det : {0.0, 1.5, -2.0}) {
        const Hamiltonian h = three_level::build_hamiltonian({w1, w2, det});
        CHECK(std_deviation(ground, h.matrix()) == doctest::Approx(w1 / 2).epsilon(1e-13));
      }
  CHECK(std_deviation(DensityMatrix::basis(2, 0), rabi(3.0).matrix()) == doctest::Approx(1.5));
}

TEST_CASE("flow rate") {
  const Hamiltonian h = rabi();
  const Projector m = Projector::basis(2, {1});
  const DensityMatrix rho = evolve(h, DensityMatrix::basis(2, 0), std::numbers::pi / 2, natural);
  CHECK(flow_rate(h, rho, m, natural) == doctest::Approx(0.5).epsilon(1e-14));

  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK(flow_rate(Hamiltonian(z), DensityMatrix::basis(2, 0), m, natural) == 0.0);

  // hbar rescales the rate.
  const UnitSystem two{2.0, "s", "J"};
  CHECK(flow_rate(h, rho, m, two) == doctest::Approx(0.25));
}

TEST_CASE("random triples: unitarity, conservation, rate bound, shift invariance") {
  Philox4x32 rng(11, 0);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Index d = 2 + trial % 7;
    const Triple s = random_triple(d, rng);
    const double t = time(rng);
    const DensityMatrix rho_t = evolve(s.h, s.rho, t, natural);
    CHECK(std::abs(rho_t.matrix().trace().real() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_t.matrix());
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);

    const double dh0 = std_deviation(s.rho, s.h.matrix());
    const double dh_t = std_deviation(rho_t, s.h.matrix());
    CHECK(std::abs(dh_t - dh0) <= 1e-9 * std::max(1.0, dh0));

    const double r = flow_rate(s.h, rho_t, s.m, natural);
    CHECK(std::abs(r) <= 2.0 * dh_t + 1e-9);

    const Hamiltonian shifted = s.h.shifted(3.7);
    const DensityMatrix rho_s = evolve(shifted, s.rho, t, natural);
    CHECK(std::abs(flow_rate(shifted, rho_s, s.m, natural) - r) < 1e-10);
    CHECK(std::abs(expectation(rho_s, s.m.matrix()) - expectation(rho_t, s.m.matrix())) < 1e-10);
    CHECK(std::abs(std_deviation(rho_s, shifted.matrix()) - dh_t) < 1e-10);
  }
}

TEST_CASE("flow rate is the derivative of the detection probability") {
  Philox4x32 rng(5, 1);
  const Triple s = random_triple(5, rng);
  const Propagator u(s.h, natural);
  const double t = 1.3;
  const double r = flow_rate(s.h, u.evolve(s.rho, t), s.m, natural);
  auto p = [&](double time) { return expectation(u.evolve(s.rho, time), s.m.matrix()); };
  auto central = [&](double h) { return std::abs((p(t + h) - p(t - h)) / (2 * h) - r); };
  const double e1 = central(0.04), e2 = central(0.02), e3 = central(0.01);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("long double instantiation") {
  using LMatrix = CMatrix<long double>;
  LMatrix h = LMatrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.5L;
  const BasicHamiltonian<long double> H(h);
  const auto rho0 = BasicDensityMatrix<long double>::basis(2, 0);
  const auto m = BasicProjector<long double>::basis(2, {1});
  const long double t = 1.0L;
  const auto rho = evolve(H, rho0, t, natural);
  const long double p = expectation(rho, m.matrix());
  CHECK(std::abs(p - std::pow(std::sin(0.5L), 2)) < 1e-17L);
  CHECK(std::abs(flow_rate(H, rho, m, natural) - 0.5L * std::sin(t)) < 1e-17L);
  CHECK(std::abs(std_deviation(rho0, H.matrix()) - 0.5L) < 1e-18L);
}
