#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace tof {

/// Uniform grid t_k = t0 + k dt, k = 0..n-1.
class TimeGrid {
 public:
  static constexpr int min_points = 11;

  TimeGrid(double t0, double tf, int n);

  double t0() const noexcept { return t0_; }
  double tf() const noexcept { return tf_; }
  int size() const noexcept { return n_; }
  double step() const noexcept { return dt_; }
  double time(int k) const noexcept { return k == n_ - 1 ? tf_ : t0_ + k * dt_; }
  Eigen::VectorXd times() const;

  /// The n-1 cell midpoints t0 + dt/2, ..., tf - dt/2. Exempt from the
  /// minimum size, so an 11-point grid yields 10 midpoints.
  TimeGrid midpoints() const;

  bool operator==(const TimeGrid&) const = default;

 private:
  struct Derived {};
  TimeGrid(double t0, double tf, int n, Derived) : t0_(t0), tf_(tf), n_(n), dt_((tf - t0) / (n - 1)) {}

  double t0_;
  double tf_;
  int n_;
  double dt_;
};

enum class QuadratureRule { simpson, trapezoid, midpoint };

std::string_view to_string(QuadratureRule rule);

/// Composite Simpson when the interval count is even, trapezoid otherwise.
QuadratureRule default_rule(const TimeGrid& grid);

Eigen::VectorXd quadrature_weights(const TimeGrid& grid, QuadratureRule rule);

double integrate(const TimeGrid& grid, QuadratureRule rule, const Eigen::Ref<const Eigen::VectorXd>& f);

}  // namespace tof
