#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "switchrad/error.hpp"

namespace switchrad {

namespace detail {

// Integral of t^(a-1) (1-t)^(b-1) over [0, h] for h <= 1/2. Double-exponential
// quadrature absorbs the algebraic singularity at t = 0.
inline double lower_beta_integral(double h, double a, double b) {
  if (h <= 0.0) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> quad;
  auto f = [a, b](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); };
  return quad.integrate(f, 0.0, h, 1e-14);
}

}  // namespace detail

/// Regularized incomplete beta function I(h; a, b).
inline double reg_inc_beta(double h, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(Errc::out_of_range, "beta parameters must be positive");
  if (!(h >= 0.0 && h <= 1.0)) throw Error(Errc::out_of_range, "incomplete beta argument must lie in [0, 1]");
  if (h == 0.0) return 0.0;
  if (h == 1.0) return 1.0;
  const double total = detail::lower_beta_integral(0.5, a, b) + detail::lower_beta_integral(0.5, b, a);
  if (h <= 0.5) return detail::lower_beta_integral(h, a, b) / total;
  return 1.0 - detail::lower_beta_integral(1.0 - h, b, a) / total;
}

/// Surface area of the unit sphere S^(n-1) in R^n.
inline double sphere_area(int n) {
  if (n < 1) throw Error(Errc::out_of_range, "dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

struct CapArea {
  double area = 0.0;
  bool clamped = false;  // r exceeded s; full sphere reported
};

/// |S^(n-1)| * I(r^2/s^2; 1/2, (n-1)/2): the area of the unit-sphere band that a
/// matrix with largest singular value s can map into the ball of radius r.
inline CapArea cap_segment_area(double r, double s, int n) {
  if (n < 2) throw Error(Errc::out_of_range, "dimension must be at least 2");
  if (!(s > 0.0) || !(r >= 0.0)) throw Error(Errc::out_of_range, "radius must be nonnegative and s positive");
  if (r >= s) return {sphere_area(n), r > s};
  const double ratio = r / s;
  return {sphere_area(n) * reg_inc_beta(ratio * ratio, 0.5, 0.5 * (n - 1)), false};
}

}  // namespace switchrad
