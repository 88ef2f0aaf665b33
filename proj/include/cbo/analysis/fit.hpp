#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace cbo::analysis {

template <std::floating_point Real>
struct LineFit {
  Real slope{};
  Real intercept{};
  Real slope_stderr{};  // 0 when only two points are available
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
template <std::floating_point Real>
LineFit<Real> fit_line(std::span<const Real> xs, std::span<const Real> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_line: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");

  Real mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<Real>(n);
  my /= static_cast<Real>(n);
  Real sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0)) throw std::invalid_argument("fit_line: abscissae are all equal");

  LineFit<Real> fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    Real ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Real r = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / static_cast<Real>(n - 2) / sxx);
  }
  return fit;
}

}  // namespace cbo::analysis
