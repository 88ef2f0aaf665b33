#pragma once

// Deterministic N-particle consensus dynamics
//
//   dx_i/dt = -lambda (x_i - m(x)),   m(x) = sum_i x_i psi_i(x),
//
// integrated with explicit Euler or classical RK4 until every pairwise gap is
// below a tolerance, plus a reduced two-particle solver that eliminates time
// via the exact gap decay x_2 - x_1 = (x_2(0) - x_1(0)) e^{-lambda t}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cbo/error.hpp"
#include "cbo/objective.hpp"

namespace cbo {

enum class Integrator { euler, rk4 };
enum class StopReason { gap_converged, t_max_reached };

inline std::string_view to_string(Integrator i) {
  return i == Integrator::euler ? "euler" : "rk4";
}

inline std::string_view to_string(StopReason r) {
  return r == StopReason::gap_converged ? "gap_converged" : "t_max_reached";
}

inline Integrator parse_integrator(std::string_view s) {
  if (s == "euler") return Integrator::euler;
  if (s == "rk4") return Integrator::rk4;
  throw std::invalid_argument("integrator must be 'euler' or 'rk4', got '" +
                              std::string(s) + "'");
}

template <std::floating_point Real = double>
struct SimConfig {
  Real lambda = 1;
  Real alpha = 0;
  std::vector<Real> initial_positions;
  Integrator integrator = Integrator::rk4;
  Real dt = Real(1e-3);
  Real gap_tol = Real(1e-10);
  Real t_max = 100;
  std::size_t sample_stride = 1;
  bool record_trajectory = false;
};

template <std::floating_point Real = double>
struct Trajectory {
  std::vector<Real> times;
  std::vector<std::vector<Real>> states;
  std::vector<Real> consensus_values;
  // First sample time at which a particle sits strictly beyond the known
  // minimizer (by more than kCrossingMargin) relative to where it started.
  std::optional<Real> crossing_time;
  std::optional<std::size_t> crossing_particle;
};

template <std::floating_point Real = double>
struct SimOutcome {
  Real x_inf_estimate{};
  Real final_gap{};
  Real final_time{};
  std::size_t steps = 0;
  StopReason stop_reason = StopReason::gap_converged;
  std::optional<Real> error_to_minimizer;
  std::optional<Trajectory<Real>> trajectory;
};

inline constexpr double kClampExcursion = 1e-9;
inline constexpr double kCrossingMargin = 1e-12;
inline constexpr std::size_t kReducedSteps = 100000;

/// x0_gap * e^{-lambda t}: the exact pairwise gap of the continuous flow.
template <std::floating_point Real>
Real analytic_gap(Real x0_gap, Real lambda, Real t) {
  return x0_gap * std::exp(-lambda * t);
}

template <std::floating_point Real>
Real max_gap(std::span<const Real> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

template <std::floating_point Real>
Real max_gap(const std::vector<Real>& x) {
  return max_gap(std::span<const Real>(x));
}

/// Throws std::invalid_argument naming the first offending field.
template <std::floating_point Real>
void validate(const SimConfig<Real>& cfg, const Objective<Real>& obj) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (!(cfg.lambda > 0) || !std::isfinite(cfg.lambda)) fail("lambda", "must be positive and finite");
  if (!(cfg.alpha >= 0) || !std::isfinite(cfg.alpha)) fail("alpha", "must be nonnegative and finite");
  if (!(cfg.dt > 0) || !std::isfinite(cfg.dt)) fail("dt", "must be positive");
  if (!(cfg.gap_tol > 0)) fail("gap_tol", "must be positive");
  if (!(cfg.t_max > 0)) fail("t_max", "must be positive");
  if (cfg.sample_stride == 0) fail("sample_stride", "must be a positive integer");
  if (!(cfg.dt * cfg.lambda < 1)) fail("dt", "dt * lambda must be < 1 for explicit stepping");
  if (cfg.initial_positions.size() < 2) fail("initial_positions", "need at least two particles");
  for (Real x : cfg.initial_positions)
    if (!obj.contains(x)) {
      std::ostringstream os;
      os.precision(17);
      os << "position " << x << " outside the domain [" << obj.domain_lo << ", "
         << obj.domain_hi << "]";
      fail("initial_positions", os.str());
    }
}

namespace detail {

template <std::floating_point Real>
std::vector<Real> velocity(const Objective<Real>& obj, Real alpha, Real lambda,
                           std::span<const Real> x) {
  const Real m = consensus_point(x, weights(obj, alpha, x));
  std::vector<Real> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = -lambda * (x[i] - m);
  return v;
}

template <std::floating_point Real>
std::vector<Real> axpy(std::span<const Real> x, Real h, const std::vector<Real>& k) {
  std::vector<Real> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + h * k[i];
  return y;
}

template <std::floating_point Real>
std::vector<Real> advance(const Objective<Real>& obj, const SimConfig<Real>& cfg,
                          std::span<const Real> x, Real h) {
  const Real a = cfg.alpha, l = cfg.lambda;
  std::vector<Real> out;
  if (cfg.integrator == Integrator::euler) {
    out = axpy(x, h, velocity(obj, a, l, x));
  } else {
    const auto k1 = velocity(obj, a, l, x);
    const auto y2 = axpy(x, h / 2, k1);
    const auto k2 = velocity(obj, a, l, std::span<const Real>(y2));
    const auto y3 = axpy(x, h / 2, k2);
    const auto k3 = velocity(obj, a, l, std::span<const Real>(y3));
    const auto y4 = axpy(x, h, k3);
    const auto k4 = velocity(obj, a, l, std::span<const Real>(y4));
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }

  const Real limit = Real(kClampExcursion);
  for (Real& xi : out) {
    if (!std::isfinite(xi)) throw invariant_error("integrator produced a non-finite position");
    if (xi < obj.domain_lo - limit || xi > obj.domain_hi + limit) {
      std::ostringstream os;
      os.precision(17);
      os << "particle left the domain: x = " << xi << " not in [" << obj.domain_lo
         << ", " << obj.domain_hi << "]";
      throw invariant_error(os.str());
    }
    xi = std::clamp(xi, obj.domain_lo, obj.domain_hi);
  }
  return out;
}

}  // namespace detail

/// One explicit step of size cfg.dt.
template <std::floating_point Real>
std::vector<Real> step(const Objective<Real>& obj, const SimConfig<Real>& cfg,
                       std::span<const Real> positions) {
  return detail::advance(obj, cfg, positions, cfg.dt);
}

template <std::floating_point Real>
std::vector<Real> step(const Objective<Real>& obj, const SimConfig<Real>& cfg,
                       const std::vector<Real>& positions) {
  return step(obj, cfg, std::span<const Real>(positions));
}

namespace detail {

template <std::floating_point Real>
struct CrossingTracker {
  std::optional<Real> x_star;
  std::vector<int> side;  // -1 below, +1 above, 0 on the minimizer

  CrossingTracker(const Objective<Real>& obj, const std::vector<Real>& x0)
      : x_star(obj.known_minimizer) {
    if (!x_star) return;
    for (Real x : x0) side.push_back(x < *x_star ? -1 : (x > *x_star ? 1 : 0));
  }

  void observe(Trajectory<Real>& traj, Real t, const std::vector<Real>& x) const {
    if (!x_star || traj.crossing_time) return;
    const Real margin = Real(kCrossingMargin);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const bool crossed = (side[i] <= 0 && x[i] > *x_star + margin) ||
                           (side[i] >= 0 && x[i] < *x_star - margin);
      // A particle starting on the minimizer "crosses" by leaving it.
      if (crossed) {
        traj.crossing_time = t;
        traj.crossing_particle = i;
        return;
      }
    }
  }
};

}  // namespace detail

/// Integrates until the max pairwise gap drops below cfg.gap_tol or
/// t reaches cfg.t_max.
///
/// During integration the flow's a-priori identities are asserted: the max
/// gap must track gap0 * e^{-lambda t} and every particle must stay within
/// |mean(x0)| + gap0 (+ 10 dt). Violations throw invariant_error.
template <std::floating_point Real>
SimOutcome<Real> simulate(const Objective<Real>& obj, const SimConfig<Real>& cfg) {
  validate(obj);
  validate(cfg, obj);

  std::vector<Real> x = cfg.initial_positions;
  const std::size_t n = x.size();
  const Real gap0 = max_gap(x);
  Real mean0 = 0;
  for (Real xi : x) mean0 += xi;
  mean0 /= static_cast<Real>(n);
  const Real bound = std::abs(mean0) + gap0 + 10 * cfg.dt;
  const Real gap_slack = cfg.integrator == Integrator::rk4
                             ? Real(1e-6) * gap0 + Real(1e-12)
                             : cfg.lambda * cfg.dt * gap0 + Real(1e-12);

  SimOutcome<Real> out;
  Trajectory<Real> traj;
  const detail::CrossingTracker<Real> crossing(obj, x);
  auto record = [&](Real t) {
    if (!cfg.record_trajectory) return;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.consensus_values.push_back(consensus_point(x, weights(obj, cfg.alpha, x)));
    crossing.observe(traj, t, x);
  };

  Real t = 0;
  std::size_t steps = 0;
  bool recorded_last = true;
  record(t);
  Real gap = gap0;
  while (gap >= cfg.gap_tol && t < cfg.t_max) {
    const Real full_t = static_cast<Real>(steps + 1) * cfg.dt;
    const Real h = full_t <= cfg.t_max ? cfg.dt : cfg.t_max - t;
    x = detail::advance(obj, cfg, std::span<const Real>(x), h);
    ++steps;
    t = full_t <= cfg.t_max ? full_t : cfg.t_max;
    gap = max_gap(x);

    if (std::abs(gap - analytic_gap(gap0, cfg.lambda, t)) > gap_slack) {
      std::ostringstream os;
      os.precision(17);
      os << "gap decay violated at t = " << t << ": gap " << gap << " vs analytic "
         << analytic_gap(gap0, cfg.lambda, t);
      throw invariant_error(os.str());
    }
    for (Real xi : x)
      if (std::abs(xi) > bound) {
        std::ostringstream os;
        os.precision(17);
        os << "uniform bound violated at t = " << t << ": |x| = " << std::abs(xi)
           << " > " << bound;
        throw invariant_error(os.str());
      }

    recorded_last = steps % cfg.sample_stride == 0;
    if (recorded_last) record(t);
  }
  if (!recorded_last) record(t);

  out.x_inf_estimate = consensus_point(x, weights(obj, cfg.alpha, x));
  out.final_gap = gap;
  out.final_time = t;
  out.steps = steps;
  out.stop_reason = gap < cfg.gap_tol ? StopReason::gap_converged : StopReason::t_max_reached;
  if (obj.known_minimizer) out.error_to_minimizer = std::abs(out.x_inf_estimate - *obj.known_minimizer);
  if (cfg.record_trajectory) out.trajectory = std::move(traj);
  return out;
}

namespace detail {

// psi_2 for the pair (x1, x1 + tau): the logistic of alpha (f(x2) - f(x1)),
// evaluated on the side that cannot overflow.
template <std::floating_point Real>
Real upper_weight(const Objective<Real>& obj, Real alpha, Real x1, Real tau) {
  const Real f1 = checked_eval(obj, x1);
  const Real f2 = checked_eval(obj, x1 + tau);
  const Real d = alpha * (f2 - f1);
  if (d >= 0) {
    const Real e = std::exp(-d);
    return e / (1 + e);
  }
  return 1 / (1 + std::exp(d));
}

}  // namespace detail

/// Two-particle solver in the gap variable tau = x2 - x1.
///
/// Since tau(t) = tau0 e^{-lambda t} exactly, x1 obeys the scalar ODE
/// dx1/dtau = -psi_2(x1, x1 + tau), which is integrated with RK4 from tau0
/// down the uniform grid tau_k = tau0 (1 - k / kReducedSteps) until
/// tau_k < gap_tol. lambda drops out entirely; it is used only to label
/// trajectory samples with times.
///
/// The fixed grid resolves the weight switch while alpha * |f(x2) - f(x1)|
/// changes by O(1) over a few cells. For alpha large enough that the pair
/// slides along f(x1) = f(x2) within a single cell (alpha ~ 1e8 on O(1)
/// objectives) the result degrades; simulate() stays accurate there.
template <std::floating_point Real>
SimOutcome<Real> reduced_two_particle(const Objective<Real>& obj, const SimConfig<Real>& cfg) {
  validate(obj);
  validate(cfg, obj);
  if (cfg.initial_positions.size() != 2)
    throw std::invalid_argument("initial_positions: reduced solver needs exactly two particles");

  const bool swapped = cfg.initial_positions[0] > cfg.initial_positions[1];
  Real x1 = std::min(cfg.initial_positions[0], cfg.initial_positions[1]);
  const Real tau0 = std::abs(cfg.initial_positions[1] - cfg.initial_positions[0]);
  const Real alpha = cfg.alpha;

  SimOutcome<Real> out;
  Trajectory<Real> traj;
  const detail::CrossingTracker<Real> crossing(obj, cfg.initial_positions);
  auto record = [&](Real tau) {
    if (!cfg.record_trajectory || !(tau > 0)) return;
    const Real t = std::log(tau0 / tau) / cfg.lambda;
    std::vector<Real> state{x1, x1 + tau};
    if (swapped) std::swap(state[0], state[1]);
    traj.times.push_back(t);
    traj.consensus_values.push_back(x1 + tau * detail::upper_weight(obj, alpha, x1, tau));
    traj.states.push_back(std::move(state));
    crossing.observe(traj, t, traj.states.back());
  };

  Real tau = tau0;
  std::size_t k = 0;
  record(tau);
  auto rhs = [&](Real x, Real g) { return -detail::upper_weight(obj, alpha, x, g); };
  auto rk4 = [&](Real x, Real from, Real to) {
    const Real h = to - from;  // negative: tau decreases
    const Real k1 = rhs(x, from);
    const Real k2 = rhs(x + h / 2 * k1, from + h / 2);
    const Real k3 = rhs(x + h / 2 * k2, from + h / 2);
    const Real k4 = rhs(x + h * k3, to);
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  };
  while (tau >= cfg.gap_tol && k < kReducedSteps) {
    const Real next = tau0 * (1 - static_cast<Real>(k + 1) / static_cast<Real>(kReducedSteps));
    x1 = rk4(x1, tau, next);
    if (!std::isfinite(x1)) throw invariant_error("reduced solver produced a non-finite position");
    x1 = std::clamp(x1, obj.domain_lo, obj.domain_hi);
    tau = next;
    ++k;
    if (k % cfg.sample_stride == 0) record(tau);
  }

  out.x_inf_estimate = tau > 0 ? x1 + tau * detail::upper_weight(obj, alpha, x1, tau) : x1;
  out.final_gap = tau;
  out.final_time = tau > 0 ? std::log(tau0 / tau) / cfg.lambda
                           : std::numeric_limits<Real>::infinity();
  out.steps = k;
  out.stop_reason = StopReason::gap_converged;
  if (obj.known_minimizer) out.error_to_minimizer = std::abs(out.x_inf_estimate - *obj.known_minimizer);
  if (cfg.record_trajectory) out.trajectory = std::move(traj);
  return out;
}

/// CSV with columns t, x_1..x_N, m, gap_max at 17 significant digits.
template <std::floating_point Real>
void write_trajectory_csv(std::ostream& os, const Trajectory<Real>& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",x_" << i;
  os << ",m,gap_max\n";
  const auto old_precision = os.precision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k];
    for (Real x : traj.states[k]) os << ',' << x;
    os << ',' << traj.consensus_values[k] << ',' << max_gap(traj.states[k]) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace cbo
