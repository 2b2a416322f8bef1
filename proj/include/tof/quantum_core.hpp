#pragma once

// Finite-dimensional quantum objects and exact unitary dynamics.
//
// Everything here is templated on the real scalar type; the aliases at the
// bottom fix it to double, which is what the rest of the library uses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "tof/errors.hpp"
#include "tof/units.hpp"

namespace tof {

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

namespace tolerance {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double negative_eigenvalue = 1e-10;
inline constexpr double idempotent = 1e-10;
inline constexpr double imaginary = 1e-10;
inline constexpr double variance = 1e-12;
}  // namespace tolerance

/// Largest entrywise |A - A^dagger|.
template <typename Derived>
auto hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

namespace detail {

template <typename Derived>
void require_square_finite(const Eigen::MatrixBase<Derived>& m, const char* what, Index min_dim) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": matrix must be square, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
  if (m.rows() < min_dim) {
    std::ostringstream os;
    os << what << ": dimension must be at least " << min_dim << ", got " << m.rows();
    throw ValidationError(os.str());
  }
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": entries must be finite");
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, const char* what) {
  const double defect = static_cast<double>(hermiticity_defect(m));
  if (defect > tolerance::hermitian) {
    std::ostringstream os;
    os << what << ": not Hermitian (max |A - A^dagger| = " << defect << ")";
    throw ValidationError(os.str());
  }
}

}  // namespace detail

struct Unchecked {};

template <typename Real>
class BasicHamiltonian {
 public:
  using Matrix = CMatrix<Real>;

  explicit BasicHamiltonian(Matrix h) : h_(std::move(h)) {
    detail::require_square_finite(h_, "Hamiltonian", 2);
    detail::require_hermitian(h_, "Hamiltonian");
  }

  const Matrix& matrix() const noexcept { return h_; }
  Index dim() const noexcept { return h_.rows(); }

  /// H + c I.
  BasicHamiltonian shifted(Real c) const {
    return BasicHamiltonian(h_ + c * Matrix::Identity(dim(), dim()));
  }
  BasicHamiltonian scaled(Real s) const { return BasicHamiltonian(s * h_); }

 private:
  Matrix h_;
};

template <typename Real>
class BasicDensityMatrix {
 public:
  using Matrix = CMatrix<Real>;
  using Vector = CVector<Real>;

  explicit BasicDensityMatrix(Matrix rho) : rho_(std::move(rho)) {
    detail::require_square_finite(rho_, "density matrix", 2);
    detail::require_hermitian(rho_, "density matrix");
    const auto tr = rho_.trace();
    if (std::abs(tr - std::complex<Real>(1)) > tolerance::trace) {
      std::ostringstream os;
      os << "density matrix: trace must be 1, got " << tr;
      throw ValidationError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tolerance::negative_eigenvalue) {
      std::ostringstream os;
      os << "density matrix: not positive semidefinite (min eigenvalue " << es.eigenvalues().minCoeff()
         << ")";
      throw ValidationError(os.str());
    }
  }

  // Skips validation; for states produced by unitary evolution of a valid state.
  BasicDensityMatrix(Matrix rho, Unchecked) : rho_(std::move(rho)) {}

  static BasicDensityMatrix pure(const Vector& psi) {
    const Real norm = psi.norm();
    if (!(norm > 0)) throw ValidationError("density matrix: zero state vector");
    const Vector u = psi / norm;
    return BasicDensityMatrix(u * u.adjoint());
  }

  static BasicDensityMatrix basis(Index dim, Index k) {
    if (k < 0 || k >= dim) throw ValidationError("density matrix: basis index out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(k, k) = 1;
    return BasicDensityMatrix(std::move(m));
  }

  static BasicDensityMatrix maximally_mixed(Index dim) {
    return BasicDensityMatrix(Matrix::Identity(dim, dim) / static_cast<Real>(dim));
  }

  const Matrix& matrix() const noexcept { return rho_; }
  Index dim() const noexcept { return rho_.rows(); }

 private:
  Matrix rho_;
};

template <typename Real>
class BasicProjector {
 public:
  using Matrix = CMatrix<Real>;

  explicit BasicProjector(Matrix m) : m_(std::move(m)) {
    detail::require_square_finite(m_, "projector", 2);
    detail::require_hermitian(m_, "projector");
    const double idem = static_cast<double>((m_ * m_ - m_).cwiseAbs().maxCoeff());
    if (idem > tolerance::idempotent) {
      std::ostringstream os;
      os << "projector: not idempotent (max |M^2 - M| = " << idem << ")";
      throw ValidationError(os.str());
    }
    rank_ = static_cast<Index>(std::llround(static_cast<double>(m_.trace().real())));
    if (rank_ < 1 || rank_ >= dim()) {
      std::ostringstream os;
      os << "projector: rank must satisfy 1 <= rank < " << dim() << ", got " << rank_;
      throw ValidationError(os.str());
    }
  }

  /// Projector onto the span of the (orthonormal) columns of `frame`.
  template <typename Derived>
  static BasicProjector onto(const Eigen::MatrixBase<Derived>& frame) {
    return BasicProjector(frame * frame.adjoint());
  }

  /// Projector onto computational basis states.
  static BasicProjector basis(Index dim, std::initializer_list<Index> levels) {
    Matrix m = Matrix::Zero(dim, dim);
    for (Index k : levels) {
      if (k < 0 || k >= dim) throw ValidationError("projector: basis index out of range");
      m(k, k) = 1;
    }
    return BasicProjector(std::move(m));
  }

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  Index rank() const noexcept { return rank_; }

 private:
  Matrix m_;
  Index rank_ = 0;
};

template <typename Real>
struct BasicSpectralDecomposition {
  RVector<Real> eigenvalues;  // ascending
  CMatrix<Real> eigenvectors;  // columns, unitary

  Real spread() const { return eigenvalues(eigenvalues.size() - 1) - eigenvalues(0); }

  CMatrix<Real> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<std::complex<Real>>().asDiagonal() *
           eigenvectors.adjoint();
  }
};

template <typename Real>
BasicSpectralDecomposition<Real> spectral_decompose(const BasicHamiltonian<Real>& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("spectral decomposition did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Caches the spectral decomposition of H so that exp(-iHt/hbar) is exact for
/// every t.
template <typename Real>
class BasicPropagator {
 public:
  using Matrix = CMatrix<Real>;

  BasicPropagator(const BasicHamiltonian<Real>& h, const UnitSystem& units)
      : spectrum_(spectral_decompose(h)), hbar_(static_cast<Real>(units.hbar)) {
    units.validate();
  }

  const BasicSpectralDecomposition<Real>& spectrum() const noexcept { return spectrum_; }
  Index dim() const noexcept { return spectrum_.eigenvalues.size(); }

  Matrix unitary(Real t) const {
    const CVector<Real> phases =
        (spectrum_.eigenvalues * (-t / hbar_)).unaryExpr([](Real a) { return std::polar(Real(1), a); });
    return spectrum_.eigenvectors * phases.asDiagonal() * spectrum_.eigenvectors.adjoint();
  }

  BasicDensityMatrix<Real> evolve(const BasicDensityMatrix<Real>& rho0, Real t) const {
    if (rho0.dim() != dim()) throw ValidationError("evolve: dimension mismatch between H and rho0");
    if (t < 0) throw ValidationError("evolve: time must be nonnegative");
    if (t == 0) return rho0;
    const Matrix u = unitary(t);
    Matrix rho = u * rho0.matrix() * u.adjoint();
    rho = (rho + rho.adjoint()).eval() * Real(0.5);
    return BasicDensityMatrix<Real>(std::move(rho), Unchecked{});
  }

 private:
  BasicSpectralDecomposition<Real> spectrum_;
  Real hbar_;
};

template <typename Real>
BasicDensityMatrix<Real> evolve(const BasicHamiltonian<Real>& h, const BasicDensityMatrix<Real>& rho0,
                                Real t, const UnitSystem& units) {
  if (h.dim() != rho0.dim()) throw ValidationError("evolve: dimension mismatch between H and rho0");
  return BasicPropagator<Real>(h, units).evolve(rho0, t);
}

/// Tr(rho A) for Hermitian A.
template <typename Real, typename Derived>
Real expectation(const BasicDensityMatrix<Real>& rho, const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != rho.dim() || a.cols() != rho.dim())
    throw ValidationError("expectation: dimension mismatch");
  detail::require_hermitian(a, "observable");
  const std::complex<Real> v = (rho.matrix() * a).trace();
  if (std::abs(v.imag()) > tolerance::imaginary)
    throw NumericalError("expectation: trace has a non-negligible imaginary part");
  return v.real();
}

/// <A^2> - <A>^2, with round-off below zero clamped.
template <typename Real, typename Derived>
Real variance(const BasicDensityMatrix<Real>& rho, const Eigen::MatrixBase<Derived>& a) {
  const CMatrix<Real> op = a;
  const Real mean = expectation(rho, op);
  const CMatrix<Real> centered = op - mean * CMatrix<Real>::Identity(op.rows(), op.cols());
  Real var = expectation(rho, (centered * centered).eval());
  if (var < -tolerance::variance) throw NumericalError("variance: negative beyond round-off");
  return var < 0 ? Real(0) : var;
}

/// Standard deviation sqrt(<A^2> - <A>^2); for A = H this is the energy spread.
template <typename Real, typename Derived>
Real std_deviation(const BasicDensityMatrix<Real>& rho, const Eigen::MatrixBase<Derived>& a) {
  return std::sqrt(variance(rho, a));
}

/// d/dt Tr(rho_t M) = -(i/hbar) Tr([H, rho_t] M).
template <typename Real>
Real flow_rate(const BasicHamiltonian<Real>& h, const BasicDensityMatrix<Real>& rho,
               const BasicProjector<Real>& m, const UnitSystem& units) {
  if (h.dim() != rho.dim() || h.dim() != m.dim()) throw ValidationError("flow_rate: dimension mismatch");
  const CMatrix<Real> comm = h.matrix() * rho.matrix() - rho.matrix() * h.matrix();
  const std::complex<Real> v =
      std::complex<Real>(0, -1) * (comm * m.matrix()).trace() / static_cast<Real>(units.hbar);
  const Real scale = std::max<Real>(Real(1), std::abs(v.real()));
  if (std::abs(v.imag()) > tolerance::imaginary * scale)
    throw NumericalError("flow_rate: commutator trace has a non-negligible imaginary part");
  return v.real();
}

using Hamiltonian = BasicHamiltonian<double>;
using DensityMatrix = BasicDensityMatrix<double>;
using Projector = BasicProjector<double>;
using SpectralDecomposition = BasicSpectralDecomposition<double>;
using Propagator = BasicPropagator<double>;
using Matrix = CMatrix<double>;
using Vector = CVector<double>;

}  // namespace tof
