#include "tof/time_grid.hpp"

#include <cmath>
#include <sstream>

#include "tof/errors.hpp"

namespace tof {

TimeGrid::TimeGrid(double t0, double tf, int n) : t0_(t0), tf_(tf), n_(n), dt_(0.0) {
  if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0)) {
    std::ostringstream os;
    os << "time grid: need finite t0 < tf, got [" << t0 << ", " << tf << "]";
    throw ValidationError(os.str());
  }
  if (n < min_points) {
    std::ostringstream os;
    os << "time grid: n must be >= " << min_points << ", got " << n;
    throw ValidationError(os.str());
  }
  dt_ = (tf - t0) / (n - 1);
}

Eigen::VectorXd TimeGrid::times() const {
  Eigen::VectorXd t(n_);
  for (int k = 0; k < n_; ++k) t(k) = time(k);
  return t;
}

TimeGrid TimeGrid::midpoints() const { return TimeGrid(t0_ + 0.5 * dt_, tf_ - 0.5 * dt_, n_ - 1, Derived{}); }

std::string_view to_string(QuadratureRule rule) {
  switch (rule) {
    case QuadratureRule::simpson: return "simpson";
    case QuadratureRule::trapezoid: return "trapezoid";
    case QuadratureRule::midpoint: return "midpoint";
  }
  return "unknown";
}

QuadratureRule default_rule(const TimeGrid& grid) {
  return (grid.size() - 1) % 2 == 0 ? QuadratureRule::simpson : QuadratureRule::trapezoid;
}

Eigen::VectorXd quadrature_weights(const TimeGrid& grid, QuadratureRule rule) {
  const int n = grid.size();
  const double h = grid.step();
  Eigen::VectorXd w(n);
  switch (rule) {
    case QuadratureRule::midpoint:
      w.setConstant(h);
      break;
    case QuadratureRule::trapezoid:
      w.setConstant(h);
      w(0) = w(n - 1) = 0.5 * h;
      break;
    case QuadratureRule::simpson:
      if ((n - 1) % 2 != 0) throw ValidationError("Simpson rule needs an even number of intervals");
      for (int k = 0; k < n; ++k) w(k) = (k % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
      w(0) = w(n - 1) = h / 3.0;
      break;
  }
  return w;
}

double integrate(const TimeGrid& grid, QuadratureRule rule, const Eigen::Ref<const Eigen::VectorXd>& f) {
  if (f.size() != grid.size()) throw ValidationError("integrate: sample count does not match grid");
  return quadrature_weights(grid, rule).dot(f);
}

}  // namespace tof
