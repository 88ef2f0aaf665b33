#pragma once

// Parameter sweeps over alpha and N with closed-form bounds attached and an
// empirical rate fitted by least squares.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbo/analysis/calyx.hpp"
#include "cbo/analysis/fit.hpp"
#include "cbo/analysis/oracles.hpp"
#include "cbo/detail/parallel.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/objective.hpp"

namespace cbo::analysis {

template <std::floating_point Real = double>
struct SweepRow {
  Real param{};
  Real x_inf{};
  Real abs_error{};
  std::optional<Real> bound_lower;
  std::optional<Real> bound_upper;
  std::optional<Real> oracle;  // exact closed-form error, when one exists
};

template <std::floating_point Real = double>
struct SweepReport {
  std::string param_name;  // "alpha" or "N"
  std::vector<SweepRow<Real>> rows;
  // alpha sweeps: slope of log(abs_error) vs log(alpha).
  // N sweeps: slope of abs_error vs ln(N).
  std::optional<Real> fitted_slope;
  Real slope_stderr = 0;
  std::size_t fitted_rows = 0;
  Real noise_floor = 0;  // rows with abs_error <= noise_floor are excluded
};

namespace detail {

template <std::floating_point Real>
void require_increasing(std::span<const Real> v, const char* what) {
  if (v.empty()) throw std::invalid_argument(std::string(what) + ": grid is empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
}

// Closed-form bounds that apply to a two-particle run on a catalog objective.
template <std::floating_point Real>
class BoundAttacher {
 public:
  BoundAttacher(const Objective<Real>& obj, const std::vector<Real>& x0)
      : obj_(obj) {
    if (x0.size() != 2 || !obj.known_minimizer) return;
    xs_ = *obj.known_minimizer;
    lo_ = std::min(x0[0], x0[1]);
    hi_ = std::max(x0[0], x0[1]);
    const bool straddles = lo_ < xs_ && xs_ < hi_;
    const std::string& fam = obj.family;
    if (fam == "linear") {
      if (lo_ == xs_ || hi_ == xs_) kind_ = Kind::linear;
    } else if (fam == "quadratic" || fam == "shifted-quadratic") {
      curvature_ = fam == "quadratic" ? Real(1) : (obj.params.size() > 1 ? obj.params[1] : Real(1));
      if (lo_ == xs_ || hi_ == xs_) kind_ = Kind::quadratic_endpoint;
      else if (straddles) kind_ = Kind::quadratic_interior;
    } else if ((fam == "double-well" || fam == "rastrigin1d") && straddles) {
      try {
        cert_ = certify_calyx(obj);
        kind_ = Kind::certificate;
      } catch (const std::exception&) {
        kind_ = Kind::none;
      }
    }
  }

  void attach(SweepRow<Real>& row, Real alpha) const {
    switch (kind_) {
      case Kind::linear:
        row.bound_upper = lipschitz_separation_bound(alpha, std::abs(obj_.params.empty() ? Real(1) : obj_.params[0]));
        break;
      case Kind::quadratic_endpoint: {
        // f = k (x - c)^2 is x^2 with alpha scaled by k.
        const auto q = oracle_quadratic_bounds(curvature_ * alpha, hi_ - lo_);
        row.bound_lower = q.lower;
        row.bound_upper = q.upper;
        break;
      }
      case Kind::quadratic_interior:
        row.bound_upper = oracle_quadratic_bounds(curvature_ * alpha, hi_ - lo_).upper;
        break;
      case Kind::certificate:
        if (cert_.applies(alpha)) row.bound_upper = cert_.bound(alpha);
        break;
      case Kind::none:
        break;
    }
  }

 private:
  enum class Kind { none, linear, quadratic_endpoint, quadratic_interior, certificate };
  const Objective<Real>& obj_;
  Kind kind_ = Kind::none;
  Real xs_{}, lo_{}, hi_{}, curvature_ = 1;
  CalyxCertificate<Real> cert_;
};

template <std::floating_point Real>
void fit_rows(SweepReport<Real>& report, Real gap_tol, bool log_log) {
  report.noise_floor = 10 * gap_tol;
  std::vector<Real> xs, ys;
  for (const auto& row : report.rows) {
    if (!(row.abs_error > report.noise_floor)) continue;
    xs.push_back(std::log(row.param));
    ys.push_back(log_log ? std::log(row.abs_error) : row.abs_error);
  }
  report.fitted_rows = xs.size();
  if (xs.size() < 2) return;
  const auto fit = fit_line(std::span<const Real>(xs), std::span<const Real>(ys));
  report.fitted_slope = fit.slope;
  report.slope_stderr = fit.slope_stderr;
}

}  // namespace detail

/// One run per alpha; two-particle configurations use the reduced solver.
template <std::floating_point Real>
SweepReport<Real> sweep_alpha(const Objective<Real>& obj, const SimConfig<Real>& base_cfg,
                              std::span<const Real> alphas, std::size_t jobs = 0) {
  if (!obj.known_minimizer)
    throw std::invalid_argument("sweep_alpha: objective has no known minimizer");
  detail::require_increasing(alphas, "sweep_alpha");
  for (Real a : alphas)
    if (!(a > 0)) throw std::invalid_argument("sweep_alpha: alphas must be positive");
  validate(base_cfg, obj);

  SweepReport<Real> report;
  report.param_name = "alpha";
  report.rows.resize(alphas.size());
  const detail::BoundAttacher<Real> bounds(obj, base_cfg.initial_positions);
  const bool reduced = base_cfg.initial_positions.size() == 2;

  cbo::detail::parallel_for(alphas.size(), jobs, [&](std::size_t i) {
    SimConfig<Real> cfg = base_cfg;
    cfg.alpha = alphas[i];
    cfg.record_trajectory = false;
    const auto out = reduced ? reduced_two_particle(obj, cfg) : simulate(obj, cfg);
    SweepRow<Real>& row = report.rows[i];
    row.param = alphas[i];
    row.x_inf = out.x_inf_estimate;
    row.abs_error = std::abs(out.x_inf_estimate - *obj.known_minimizer);
    bounds.attach(row, alphas[i]);
  });

  detail::fit_rows(report, base_cfg.gap_tol, /*log_log=*/true);
  return report;
}

template <std::floating_point Real>
SweepReport<Real> sweep_alpha(const Objective<Real>& obj, const SimConfig<Real>& base_cfg,
                              const std::vector<Real>& alphas, std::size_t jobs = 0) {
  return sweep_alpha(obj, base_cfg, std::span<const Real>(alphas), jobs);
}

/// f(x) = x on [0, width], j particles at 0 and N - j at width, one run per N
/// with the full N-particle integrator. Each row carries the exact error.
template <std::floating_point Real>
SweepReport<Real> sweep_n(Real alpha, Real width, std::span<const int> ns, int j,
                          const SimConfig<Real>& base_cfg, std::size_t jobs = 0) {
  if (ns.empty()) throw std::invalid_argument("sweep_n: grid is empty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 2) throw std::invalid_argument("sweep_n: N must be at least 2");
    if (i > 0 && ns[i] <= ns[i - 1])
      throw std::invalid_argument("sweep_n: grid must be strictly increasing");
    if (j < 1 || j > ns[i] - 1)
      throw std::invalid_argument("sweep_n: need 1 <= j <= N - 1 for every N");
  }
  if (!(alpha > 0) || !(width > 0))
    throw std::invalid_argument("sweep_n: alpha and width must be positive");

  const Real one = 1;
  const auto obj = builtin_objective<Real>("linear", std::span<const Real>(&one, 1),
                                           Interval<Real>{0, width});
  SweepReport<Real> report;
  report.param_name = "N";
  report.rows.resize(ns.size());

  cbo::detail::parallel_for(ns.size(), jobs, [&](std::size_t i) {
    const int n = ns[i];
    SimConfig<Real> cfg = base_cfg;
    cfg.alpha = alpha;
    cfg.record_trajectory = false;
    cfg.initial_positions.assign(static_cast<std::size_t>(n), width);
    std::fill_n(cfg.initial_positions.begin(), j, Real(0));
    const auto out = simulate(obj, cfg);
    SweepRow<Real>& row = report.rows[i];
    row.param = static_cast<Real>(n);
    row.x_inf = out.x_inf_estimate;
    row.abs_error = std::abs(out.x_inf_estimate);
    row.oracle = oracle_nparticle_linear_error(alpha, n, j, width);
  });

  detail::fit_rows(report, base_cfg.gap_tol, /*log_log=*/false);
  return report;
}

template <std::floating_point Real>
SweepReport<Real> sweep_n(Real alpha, Real width, const std::vector<int>& ns, int j,
                          const SimConfig<Real>& base_cfg, std::size_t jobs = 0) {
  return sweep_n(alpha, width, std::span<const int>(ns), j, base_cfg, jobs);
}

/// CSV: param,x_inf,abs_error,bound_lower,bound_upper (plus oracle and
/// oracle_mismatch when any row has an exact value), then a footer comment
/// with the fitted slope. Missing values are left empty.
template <std::floating_point Real>
void write_sweep_csv(std::ostream& os, const SweepReport<Real>& report) {
  const bool with_oracle = std::any_of(report.rows.begin(), report.rows.end(),
                                       [](const auto& r) { return r.oracle.has_value(); });
  const auto old_precision = os.precision(17);
  auto opt = [&](const std::optional<Real>& v) {
    if (v) os << *v;
  };
  os << "param,x_inf,abs_error,bound_lower,bound_upper";
  if (with_oracle) os << ",oracle,oracle_mismatch";
  os << '\n';
  for (const auto& r : report.rows) {
    os << r.param << ',' << r.x_inf << ',' << r.abs_error << ',';
    opt(r.bound_lower);
    os << ',';
    opt(r.bound_upper);
    if (with_oracle) {
      os << ',';
      opt(r.oracle);
      os << ',';
      if (r.oracle) os << std::abs(r.abs_error - *r.oracle);
    }
    os << '\n';
  }
  os << "# fitted_slope=";
  if (report.fitted_slope) os << *report.fitted_slope;
  else os << "undefined";
  os << ",slope_stderr=" << report.slope_stderr << '\n';
  os.precision(old_precision);
}

}  // namespace cbo::analysis
