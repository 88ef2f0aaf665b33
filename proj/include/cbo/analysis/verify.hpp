#pragma once

// Post-hoc audit of a recorded trajectory against the flow's a-priori
// identities: exact gap decay, preserved ordering, consensus point inside the
// hull, the drift bound on the particle average, and uniform boundedness.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cbo/dynamics.hpp"
#include "cbo/error.hpp"
#include "cbo/objective.hpp"

namespace cbo::analysis {

template <std::floating_point Real = double>
struct InvariantCheck {
  std::string name;
  bool passed = false;
  Real worst_residual{};
  Real threshold{};
};

template <std::floating_point Real = double>
struct InvariantReport {
  std::vector<InvariantCheck<Real>> checks;
  std::optional<SimOutcome<Real>> outcome;
  std::size_t samples = 0;

  bool all_passed() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

inline constexpr double kRk4GapDecayTolerance = 1e-8;
inline constexpr double kAverageBoundSlack = 1e-8;

template <std::floating_point Real>
InvariantReport<Real> verify_invariants(const Objective<Real>& obj, const SimConfig<Real>& cfg) {
  SimConfig<Real> run = cfg;
  run.record_trajectory = true;

  InvariantReport<Real> report;
  try {
    report.outcome = simulate(obj, run);
  } catch (const invariant_error& e) {
    report.checks.push_back({std::string("integration: ") + e.what(), false, 0, 0});
    return report;
  }
  const Trajectory<Real>& traj = *report.outcome->trajectory;
  report.samples = traj.times.size();

  const std::vector<Real>& x0 = cfg.initial_positions;
  const std::size_t n = x0.size();
  const Real gap0 = max_gap(x0);
  const Real mean0 = std::accumulate(x0.begin(), x0.end(), Real(0)) / static_cast<Real>(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return x0[i] < x0[j]; });

  Real gap_res = 0, order_res = 0, hull_res = 0, avg_res = 0, bound_res = 0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const Real t = traj.times[k];
    const auto& x = traj.states[k];
    const Real decay = std::exp(-cfg.lambda * t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        gap_res = std::max(gap_res, std::abs((x[i] - x[j]) - (x0[i] - x0[j]) * decay));
    for (std::size_t i = 0; i + 1 < n; ++i)
      order_res = std::max(order_res, x[order[i]] - x[order[i + 1]]);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const Real m = traj.consensus_values[k];
    hull_res = std::max({hull_res, *lo - m, m - *hi});
    const Real mean = std::accumulate(x.begin(), x.end(), Real(0)) / static_cast<Real>(n);
    const Real avg_bound = std::abs(mean0) + gap0 * (1 - decay);
    avg_res = std::max(avg_res, std::abs(mean) - avg_bound);
    for (Real xi : x) bound_res = std::max(bound_res, std::abs(xi) - (std::abs(mean0) + gap0));
  }

  const Real gap_threshold = cfg.integrator == Integrator::rk4
                                 ? Real(kRk4GapDecayTolerance)
                                 : cfg.lambda * cfg.dt * gap0;
  auto add = [&](std::string name, Real residual, Real threshold) {
    report.checks.push_back({std::move(name), residual <= threshold, residual, threshold});
  };
  add("gap_decay", gap_res, gap_threshold);
  add("order_preservation", order_res, 0);
  add("consensus_in_hull", hull_res, 0);
  add("average_drift_bound", avg_res, Real(kAverageBoundSlack));
  add("uniform_boundedness", bound_res, 10 * cfg.dt);
  return report;
}

}  // namespace cbo::analysis
