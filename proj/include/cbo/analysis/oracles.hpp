#pragma once

// Closed-form error values and bounds for the two-particle and N-particle
// consensus limit on linear and quadratic objectives.

#include <cmath>
#include <concepts>
#include <numbers>
#include <stdexcept>

namespace cbo::analysis {

/// Exact |x_inf - x_*| for f(x) = x with particles started at both ends of an
/// interval of the given width:
///   (1/alpha) (ln 2 - ln(1 + e^{-alpha width})).
/// Written as -log1p(expm1(-s) / 2) / alpha so it stays accurate as
/// alpha * width -> 0.
template <std::floating_point Real>
Real oracle_linear_error(Real alpha, Real width) {
  if (!(alpha > 0) || !(width > 0))
    throw std::invalid_argument("oracle_linear_error: alpha and width must be positive");
  return -std::log1p(std::expm1(-alpha * width) / 2) / alpha;
}

/// Exact x_inf - x_* for f(x) = x with j particles at a and N - j at b:
///   (1/alpha) ln(N / (j + (N - j) e^{-alpha width})).
template <std::floating_point Real>
Real oracle_nparticle_linear_error(Real alpha, int n, int j, Real width) {
  if (!(alpha > 0) || !(width > 0))
    throw std::invalid_argument("oracle_nparticle_linear_error: alpha and width must be positive");
  if (n < 2 || j < 1 || j > n - 1)
    throw std::invalid_argument("oracle_nparticle_linear_error: need N >= 2 and 1 <= j <= N-1");
  const Real frac = static_cast<Real>(n - j) / static_cast<Real>(n);
  return -std::log1p(frac * std::expm1(-alpha * width)) / alpha;
}

template <std::floating_point Real>
struct QuadraticBounds {
  Real lower{};
  Real upper{};
};

/// Bounds on x_inf for f(x) = x^2 on [0, b] with particles started at 0 and b:
///   upper = sqrt(ln 2 / (2 alpha))            (curvature constant 2)
///   lower = (sqrt(pi)/2 - e^{-alpha b^2} / (sqrt(alpha) b)) / (4 sqrt(alpha))
/// The lower bound is only informative once sqrt(alpha) b is large; it is
/// returned as-is (possibly negative) otherwise.
template <std::floating_point Real>
QuadraticBounds<Real> oracle_quadratic_bounds(Real alpha, Real b) {
  if (!(alpha > 0) || !(b > 0))
    throw std::invalid_argument("oracle_quadratic_bounds: alpha and b must be positive");
  const Real root = std::sqrt(alpha);
  const Real half_sqrt_pi = std::sqrt(std::numbers::pi_v<Real>) / 2;
  QuadraticBounds<Real> q;
  q.upper = std::sqrt(std::numbers::ln2_v<Real> / (2 * alpha));
  q.lower = (half_sqrt_pi - std::exp(-alpha * b * b) / (root * b)) / (4 * root);
  return q;
}

/// ln 2 / (alpha c_f): the drift bound for a particle separated from its
/// partner with |f(x) - f(y)| >= c_f |x - y|.
template <std::floating_point Real>
Real lipschitz_separation_bound(Real alpha, Real c_f) {
  if (!(alpha > 0) || !(c_f > 0))
    throw std::invalid_argument("lipschitz_separation_bound: alpha and c_f must be positive");
  return std::numbers::ln2_v<Real> / (alpha * c_f);
}

}  // namespace cbo::analysis
