#pragma once

// Constructive error-bound certificate for C^2 objectives with a unique,
// nondegenerate interior minimizer.
//
// The construction finds a radius r1 on which the curvature is pinched
// (c1 <= f'' <= C1), the value gap delta between f_* and the infimum of f
// outside that radius, and from these the calyx radius r2, the linear
// separation constant c2 and the threshold alpha0 = 1 / (r2 c2). For
// alpha > alpha0 the two-particle consensus limit satisfies
//
//   |x_inf - x_*| <= ln 2 / (alpha c2) + sqrt(ln 2 / (alpha c1)).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cbo/error.hpp"
#include "cbo/objective.hpp"

namespace cbo::analysis {

template <std::floating_point Real = double>
struct CalyxCertificate {
  Real x_star{};
  Real curvature_at_minimizer{};  // finite-difference f''(x_*)
  Real r1{};
  Real c1{};
  Real C1{};
  Real f_star{};
  Real f1{};
  Real delta{};
  Real r2{};
  Real c2{};
  // Threshold with 1 / (alpha0 c2) = r2. It also stands in for the
  // existence threshold alpha_1 of the error bound, which is not pinned down further.
  Real alpha0{};

  bool applies(Real alpha) const { return alpha > alpha0; }

  Real bound(Real alpha) const {
    const Real ln2 = std::numbers::ln2_v<Real>;
    return ln2 / (alpha * c2) + std::sqrt(ln2 / (alpha * c1));
  }

  /// Constant c with bound(alpha) <= c / sqrt(alpha) for all alpha > alpha0.
  Real sqrt_rate_constant() const {
    const Real ln2 = std::numbers::ln2_v<Real>;
    return ln2 / (c2 * std::sqrt(alpha0)) + std::sqrt(ln2 / c1);
  }
};

inline constexpr double kCurvatureStepDivisor = 1e6;
inline constexpr std::size_t kDefaultCalyxGrid = 10000;

namespace detail {

template <std::floating_point Real>
struct SecondDifference {
  const Objective<Real>& obj;
  Real h;

  // Stencil kept inside [a, b]; points within h of an end reuse the nearest
  // interior stencil.
  Real operator()(Real x) const {
    const Real c = std::clamp(x, obj.domain_lo + h, obj.domain_hi - h);
    return (obj.eval(c + h) - 2 * obj.eval(c) + obj.eval(c - h)) / (h * h);
  }

  Real noise(Real x) const {
    const Real scale = std::max(Real(1), std::abs(obj.eval(x)));
    return 16 * std::numeric_limits<Real>::epsilon() * scale / (h * h);
  }
};

}  // namespace detail

template <std::floating_point Real>
CalyxCertificate<Real> certify_calyx(const Objective<Real>& obj,
                                     std::size_t grid_n = kDefaultCalyxGrid) {
  validate(obj);
  if (grid_n < 3) throw std::invalid_argument("certify_calyx: grid_n must be at least 3");
  if (!obj.known_minimizer)
    throw std::invalid_argument("certify_calyx: objective has no known minimizer");
  const Real a = obj.domain_lo, b = obj.domain_hi;
  const Real xs = *obj.known_minimizer;
  if (!(a < xs && xs < b))
    throw std::invalid_argument(
        "certify_calyx: minimizer on the domain boundary is unsupported "
        "(the bound needs x_* strictly between the initial particles)");

  const detail::SecondDifference<Real> d2{obj, (b - a) / Real(kCurvatureStepDivisor)};
  CalyxCertificate<Real> cert;
  cert.x_star = xs;
  cert.f_star = obj.eval(xs);
  cert.curvature_at_minimizer = d2(xs);
  if (!(cert.curvature_at_minimizer > d2.noise(xs))) {
    std::ostringstream os;
    os.precision(6);
    os << "hypothesis f''(x_*) != 0 violated: finite-difference f''(" << xs
       << ") = " << cert.curvature_at_minimizer << " is not above the noise level "
       << d2.noise(xs);
    throw hypothesis_error(os.str());
  }

  // Grow r over multiples of the grid spacing while f'' stays above half its
  // value at the minimizer on every in-domain sample.
  const Real spacing = (b - a) / static_cast<Real>(grid_n - 1);
  const Real reach = std::max(xs - a, b - xs);
  const Real pinch = cert.curvature_at_minimizer / 2;
  Real c1 = cert.curvature_at_minimizer, C1 = cert.curvature_at_minimizer;
  Real r1 = reach;
  for (std::size_t k = 1;; ++k) {
    const Real r = static_cast<Real>(k) * spacing;
    if (r >= reach) break;
    Real lo = std::numeric_limits<Real>::infinity(), hi = -lo;
    for (Real x : {xs - r, xs + r}) {
      if (x < a || x > b) continue;
      const Real k2 = d2(x);
      lo = std::min(lo, k2);
      hi = std::max(hi, k2);
    }
    if (lo < pinch) {
      r1 = static_cast<Real>(k - 1) * spacing;
      break;
    }
    c1 = std::min(c1, lo);
    C1 = std::max(C1, hi);
  }
  if (!(r1 > 0))
    throw std::runtime_error("certify_calyx: curvature pinch radius is below the grid spacing; "
                             "increase grid_n");
  if (r1 == reach) {
    // The pinch covers the whole domain; include the end samples.
    for (Real x : {a, b}) {
      c1 = std::min(c1, d2(x));
      C1 = std::max(C1, d2(x));
    }
  }

  // Infimum of f over [a, b] minus the open interval (x_* - r1, x_* + r1),
  // sampled on each remaining piece at no more than the grid spacing. With a
  // Lipschitz constant L, a cell of length s with end values u, v cannot dip
  // below (u + v - L s) / 2.
  Real f1 = std::numeric_limits<Real>::infinity();
  auto scan_piece = [&](Real from, Real to) {
    if (from > to) return;
    Real prev = obj.eval(from);
    f1 = std::min(f1, prev);
    if (from == to) return;
    const auto cells = static_cast<std::size_t>(std::ceil((to - from) / spacing));
    const Real len = (to - from) / static_cast<Real>(cells);
    for (std::size_t k = 1; k <= cells; ++k) {
      const Real x = k == cells ? to : from + static_cast<Real>(k) * len;
      const Real fx = obj.eval(x);
      f1 = std::min(f1, fx);
      if (obj.lipschitz_hint) f1 = std::min(f1, (prev + fx - *obj.lipschitz_hint * len) / 2);
      prev = fx;
    }
  };
  scan_piece(a, xs - r1);
  scan_piece(xs + r1, b);

  cert.r1 = r1;
  cert.c1 = c1;
  cert.C1 = C1;
  cert.f1 = f1;
  cert.delta = f1 - cert.f_star;
  if (!(cert.delta > 0)) {
    std::ostringstream os;
    os.precision(6);
    os << "minimizer is not unique on the grid: inf of f outside radius " << r1 << " is "
       << f1 << " <= f(x_*) = " << cert.f_star;
    throw hypothesis_error(os.str());
  }
  cert.r2 = std::min(std::sqrt(cert.delta / C1), r1);
  cert.c2 = std::min(cert.delta / (2 * std::max(b - xs, xs - a)), c1 * cert.r2 / 2);
  cert.alpha0 = 1 / (cert.r2 * cert.c2);
  return cert;
}

}  // namespace cbo::analysis
