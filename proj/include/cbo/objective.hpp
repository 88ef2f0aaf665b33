#pragma once

// One-dimensional objectives on a closed interval, the builtin catalog, and
// the softmax weights exp(-alpha f) / sum exp(-alpha f) that drive the
// consensus point.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbo {

template <std::floating_point Real = double>
struct Interval {
  Real lo{};
  Real hi{};

  Real width() const { return hi - lo; }
  bool contains(Real x) const { return lo <= x && x <= hi; }
};

template <std::floating_point Real = double>
struct Objective {
  Real domain_lo{};
  Real domain_hi{};
  std::function<Real(Real)> eval;
  std::optional<Real> known_minimizer;
  std::optional<Real> lipschitz_hint;
  // Catalog family and the parameters it was built from; empty for
  // user-assembled objectives. Analysis uses these to attach closed-form
  // bounds.
  std::string family;
  std::vector<Real> params;

  Real operator()(Real x) const { return eval(x); }
  Interval<Real> domain() const { return {domain_lo, domain_hi}; }
  Real width() const { return domain_hi - domain_lo; }
  bool contains(Real x) const { return domain_lo <= x && x <= domain_hi; }
};

/// Throws std::invalid_argument if the objective's own invariants fail.
template <std::floating_point Real>
void validate(const Objective<Real>& obj) {
  if (!(obj.domain_lo < obj.domain_hi))
    throw std::invalid_argument("objective domain must satisfy lo < hi");
  if (!std::isfinite(obj.domain_lo) || !std::isfinite(obj.domain_hi))
    throw std::invalid_argument("objective domain must be finite");
  if (!obj.eval) throw std::invalid_argument("objective has no evaluator");
  if (obj.known_minimizer && !obj.contains(*obj.known_minimizer))
    throw std::invalid_argument("known minimizer lies outside the domain");
  if (obj.lipschitz_hint && !(*obj.lipschitz_hint >= 0))
    throw std::invalid_argument("lipschitz hint must be nonnegative");
}

template <std::floating_point Real = double>
struct WeightVector {
  std::vector<Real> psi;

  std::size_t size() const { return psi.size(); }
  Real operator[](std::size_t i) const { return psi[i]; }
  auto begin() const { return psi.begin(); }
  auto end() const { return psi.end(); }
};

namespace detail {

template <std::floating_point Real>
Real domain_slack(const Objective<Real>& obj) {
  return Real(1e-9) * std::max(Real(1), obj.width());
}

template <std::floating_point Real>
Real checked_eval(const Objective<Real>& obj, Real x) {
  const Real fx = obj.eval(x);
  if (!std::isfinite(fx)) {
    std::ostringstream os;
    os.precision(17);
    os << "objective returned a non-finite value at x = " << x;
    throw std::domain_error(os.str());
  }
  return fx;
}

}  // namespace detail

/// Normalized weights psi_i = exp(-alpha f(x_i)) / sum_k exp(-alpha f(x_k)).
///
/// Exponents are taken relative to the smallest objective value, so the
/// largest unnormalized weight is exactly 1 and the denominator lies in
/// [1, N] for every finite alpha.
template <std::floating_point Real>
WeightVector<Real> weights(const Objective<Real>& obj, Real alpha,
                           std::span<const Real> positions) {
  if (positions.empty())
    throw std::invalid_argument("weights: empty position list");
  if (!std::isfinite(alpha) || alpha < 0)
    throw std::invalid_argument("weights: alpha must be finite and >= 0");

  const Real slack = detail::domain_slack(obj);
  std::vector<Real> f(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Real x = positions[i];
    if (!(x >= obj.domain_lo - slack && x <= obj.domain_hi + slack)) {
      std::ostringstream os;
      os.precision(17);
      os << "weights: position " << x << " outside the domain ["
         << obj.domain_lo << ", " << obj.domain_hi << "]";
      throw std::out_of_range(os.str());
    }
    f[i] = detail::checked_eval(obj, x);
  }

  const Real f_min = *std::min_element(f.begin(), f.end());
  WeightVector<Real> w;
  w.psi.resize(f.size());
  Real sum = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    w.psi[i] = alpha == 0 ? Real(1) : std::exp(-alpha * (f[i] - f_min));
    sum += w.psi[i];
  }
  for (Real& p : w.psi) p /= sum;
  return w;
}

template <std::floating_point Real>
WeightVector<Real> weights(const Objective<Real>& obj, Real alpha,
                           const std::vector<Real>& positions) {
  return weights(obj, alpha, std::span<const Real>(positions));
}

/// m = sum_i x_i psi_i, clamped to the hull of the positions so rounding can
/// never place it outside.
template <std::floating_point Real>
Real consensus_point(std::span<const Real> positions,
                     const WeightVector<Real>& w) {
  if (positions.size() != w.size())
    throw std::invalid_argument("consensus_point: length mismatch");
  if (positions.empty())
    throw std::invalid_argument("consensus_point: empty position list");
  Real m = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) m += positions[i] * w[i];
  const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
  return std::clamp(m, *lo, *hi);
}

template <std::floating_point Real>
Real consensus_point(const std::vector<Real>& positions,
                     const WeightVector<Real>& w) {
  return consensus_point(std::span<const Real>(positions), w);
}

// --- catalog ---------------------------------------------------------------

/// Piecewise-linear interpolant through (xs, fs); constant beyond the ends.
template <std::floating_point Real = double>
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<Real> xs, std::vector<Real> fs)
      : xs_(std::move(xs)), fs_(std::move(fs)) {
    if (xs_.size() != fs_.size())
      throw std::invalid_argument("table: x and f columns differ in length");
    if (xs_.size() < 2)
      throw std::invalid_argument("table: need at least two rows");
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!std::isfinite(xs_[i]) || !std::isfinite(fs_[i]))
        throw std::invalid_argument("table: non-finite entry");
      if (i > 0 && !(xs_[i] > xs_[i - 1]))
        throw std::invalid_argument("table: x must be strictly increasing");
    }
  }

  Real operator()(Real x) const {
    if (x <= xs_.front()) return fs_.front();
    if (x >= xs_.back()) return fs_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
    const Real t = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
    return fs_[k - 1] + t * (fs_[k] - fs_[k - 1]);
  }

  Real max_slope() const {
    Real s = 0;
    for (std::size_t k = 1; k < xs_.size(); ++k)
      s = std::max(s, std::abs((fs_[k] - fs_[k - 1]) / (xs_[k] - xs_[k - 1])));
    return s;
  }

  const std::vector<Real>& xs() const { return xs_; }
  const std::vector<Real>& fs() const { return fs_; }

 private:
  std::vector<Real> xs_;
  std::vector<Real> fs_;
};

namespace detail {

[[noreturn]] inline void bad_params(std::string_view family, const std::string& why) {
  throw std::invalid_argument(std::string(family) + ": " + why);
}

template <std::floating_point Real>
Real param_or(std::span<const Real> p, std::size_t i, Real fallback) {
  return i < p.size() ? p[i] : fallback;
}

template <std::floating_point Real>
void require_param_count(std::string_view family, std::span<const Real> p,
                         std::size_t max_count) {
  if (p.size() > max_count)
    bad_params(family, "expected at most " + std::to_string(max_count) +
                                 " parameters, got " + std::to_string(p.size()));
}

template <std::floating_point Real>
void require_minimizer_inside(std::string_view family, Interval<Real> dom,
                              Real x_star) {
  if (!dom.contains(x_star)) {
    std::ostringstream os;
    os.precision(17);
    os << "minimizer " << x_star << " lies outside the domain [" << dom.lo
       << ", " << dom.hi << "]";
    bad_params(family, os.str());
  }
}

// Argmin over a finite candidate set; throws when the minimum is shared.
template <std::floating_point Real>
Real unique_argmin(std::string_view family, const std::vector<Real>& xs,
                   const std::function<Real(Real)>& f) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (f(xs[i]) < f(xs[best])) best = i;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] != xs[best] && f(xs[i]) == f(xs[best]))
      bad_params(family, "global minimizer is not unique");
  return xs[best];
}

}  // namespace detail

/// Families understood by builtin_objective, in catalog order.
inline constexpr std::string_view kBuiltinFamilies[] = {
    "linear",      "quadratic",  "shifted-quadratic", "double-well",
    "rastrigin1d", "quartic",    "custom-table"};

/// Default working interval per family (the table family takes its extent
/// from the table itself).
template <std::floating_point Real = double>
std::optional<Interval<Real>> default_domain(std::string_view family) {
  if (family == "linear" || family == "quadratic" ||
      family == "shifted-quadratic" || family == "double-well")
    return Interval<Real>{0, 1};
  if (family == "rastrigin1d") return Interval<Real>{Real(-5.12), Real(5.12)};
  if (family == "quartic") return Interval<Real>{-1, 1};
  return std::nullopt;
}

/// Builds a catalog objective.
///
///   linear            [slope=1]            slope*(x-a) (slope>0) or slope*(x-b)
///   quadratic         []                   x^2
///   shifted-quadratic [center, curv=1]     curv*(x-center)^2
///   double-well       [p=0.25, q=0.75, m=0.45, scale=1000]
///                                          f' = scale*(x-p)(x-m)(x-q), wells at
///                                          p and q, barrier at m
///   rastrigin1d       [center=0, amp=10]   (x-c)^2 + amp*(1-cos(2 pi (x-c)))
///   quartic           [center=0]           (x-center)^4
///   custom-table      [x0, f0, x1, f1, ...] piecewise-linear interpolation
///
/// Every builtin is shifted so that its minimum over the domain is 0, except
/// custom-table, which keeps the user's values.
template <std::floating_point Real = double>
Objective<Real> builtin_objective(std::string_view name,
                                  std::span<const Real> params,
                                  std::optional<Interval<Real>> domain = {}) {
  Objective<Real> obj;
  obj.family = std::string(name);
  obj.params.assign(params.begin(), params.end());

  if (name == "custom-table") {
    if (params.size() < 4 || params.size() % 2 != 0)
      detail::bad_params(name, "expected interleaved (x, f) pairs, at least two");
    std::vector<Real> xs, fs;
    for (std::size_t i = 0; i < params.size(); i += 2) {
      xs.push_back(params[i]);
      fs.push_back(params[i + 1]);
    }
    PiecewiseLinear<Real> table(std::move(xs), std::move(fs));
    const Interval<Real> extent{table.xs().front(), table.xs().back()};
    const Interval<Real> dom = domain.value_or(extent);
    if (!(dom.lo >= extent.lo && dom.hi <= extent.hi && dom.lo < dom.hi))
      detail::bad_params(name, "domain must lie within the table's x range");
    obj.domain_lo = dom.lo;
    obj.domain_hi = dom.hi;
    obj.lipschitz_hint = table.max_slope();
    // The interpolant attains its minimum at a node or an endpoint.
    std::vector<Real> candidates{dom.lo, dom.hi};
    for (Real x : table.xs())
      if (dom.lo < x && x < dom.hi) candidates.push_back(x);
    std::sort(candidates.begin(), candidates.end());
    obj.eval = table;
    obj.known_minimizer = detail::unique_argmin<Real>(name, candidates, obj.eval);
    return obj;
  }

  const auto fallback = default_domain<Real>(name);
  if (!fallback) throw std::invalid_argument("unknown objective family '" + std::string(name) + "'");
  const Interval<Real> dom = domain.value_or(*fallback);
  if (!(dom.lo < dom.hi) || !std::isfinite(dom.lo) || !std::isfinite(dom.hi))
    detail::bad_params(name, "domain must be finite with lo < hi");
  obj.domain_lo = dom.lo;
  obj.domain_hi = dom.hi;
  const Real a = dom.lo, b = dom.hi;

  if (name == "linear") {
    detail::require_param_count<Real>(name, params, 1);
    const Real slope = detail::param_or<Real>(params, 0, 1);
    if (slope == 0 || !std::isfinite(slope))
      detail::bad_params(name, "slope must be finite and nonzero");
    const Real anchor = slope > 0 ? a : b;
    obj.eval = [slope, anchor](Real x) { return slope * (x - anchor); };
    obj.known_minimizer = anchor;
    obj.lipschitz_hint = std::abs(slope);
  } else if (name == "quadratic") {
    detail::require_param_count<Real>(name, params, 0);
    detail::require_minimizer_inside<Real>(name, dom, 0);
    obj.eval = [](Real x) { return x * x; };
    obj.known_minimizer = Real(0);
    obj.lipschitz_hint = 2 * std::max(std::abs(a), std::abs(b));
  } else if (name == "shifted-quadratic") {
    if (params.empty()) detail::bad_params(name, "center is required");
    detail::require_param_count<Real>(name, params, 2);
    const Real c = params[0];
    const Real k = detail::param_or<Real>(params, 1, 1);
    if (!(k > 0)) detail::bad_params(name, "curvature must be positive");
    detail::require_minimizer_inside<Real>(name, dom, c);
    obj.eval = [c, k](Real x) { return k * (x - c) * (x - c); };
    obj.known_minimizer = c;
    obj.lipschitz_hint = 2 * k * std::max(c - a, b - c);
  } else if (name == "double-well") {
    detail::require_param_count<Real>(name, params, 4);
    const Real p = detail::param_or<Real>(params, 0, Real(0.25));
    const Real q = detail::param_or<Real>(params, 1, Real(0.75));
    const Real m = detail::param_or<Real>(params, 2, Real(0.45));
    const Real s = detail::param_or<Real>(params, 3, Real(1000));
    if (!(p < m && m < q)) detail::bad_params(name, "need p < m < q");
    if (!(s > 0)) detail::bad_params(name, "scale must be positive");
    // Antiderivative of s*(x-p)(x-m)(x-q).
    const Real e1 = p + m + q, e2 = p * m + p * q + m * q, e3 = p * m * q;
    auto raw = [=](Real x) {
      return s * (((x / 4 - e1 / 3) * x + e2 / 2) * x - e3) * x;
    };
    std::vector<Real> candidates{a, b};
    for (Real c : {p, q})
      if (a < c && c < b) candidates.push_back(c);
    std::sort(candidates.begin(), candidates.end());
    const Real x_star = detail::unique_argmin<Real>(name, candidates, raw);
    const Real base = raw(x_star);
    obj.eval = [raw, base](Real x) { return raw(x) - base; };
    obj.known_minimizer = x_star;
    auto far = [a, b](Real c) { return std::max(std::abs(a - c), std::abs(b - c)); };
    obj.lipschitz_hint = s * far(p) * far(m) * far(q);
  } else if (name == "rastrigin1d") {
    detail::require_param_count<Real>(name, params, 2);
    const Real c = detail::param_or<Real>(params, 0, 0);
    const Real amp = detail::param_or<Real>(params, 1, 10);
    if (!(amp >= 0)) detail::bad_params(name, "amplitude must be nonnegative");
    detail::require_minimizer_inside<Real>(name, dom, c);
    obj.eval = [c, amp](Real x) {
      const Real u = x - c;
      return u * u + amp * (1 - std::cos(2 * std::numbers::pi_v<Real> * u));
    };
    obj.known_minimizer = c;
    obj.lipschitz_hint = 2 * std::max(c - a, b - c) + 2 * std::numbers::pi_v<Real> * amp;
  } else if (name == "quartic") {
    detail::require_param_count<Real>(name, params, 1);
    const Real c = detail::param_or<Real>(params, 0, 0);
    detail::require_minimizer_inside<Real>(name, dom, c);
    obj.eval = [c](Real x) {
      const Real u = (x - c) * (x - c);
      return u * u;
    };
    obj.known_minimizer = c;
    const Real r = std::max(c - a, b - c);
    obj.lipschitz_hint = 4 * r * r * r;
  }
  return obj;
}

template <std::floating_point Real = double>
Objective<Real> builtin_objective(std::string_view name,
                                  std::initializer_list<Real> params = {},
                                  std::optional<Interval<Real>> domain = {}) {
  return builtin_objective<Real>(name, std::span<const Real>(params.begin(), params.size()),
                                 domain);
}

/// Reads a two-column (x, f) CSV. A first line that does not parse as two
/// numbers is treated as a header.
template <std::floating_point Real = double>
std::pair<std::vector<Real>, std::vector<Real>> read_table_csv(std::istream& in) {
  std::vector<Real> xs, fs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    long double x = 0, f = 0;
    std::string rest;
    if (!(row >> x >> f) || (row >> rest)) {
      if (line_no == 1 && xs.empty()) continue;
      throw std::invalid_argument("table: malformed row " + std::to_string(line_no));
    }
    xs.push_back(static_cast<Real>(x));
    fs.push_back(static_cast<Real>(f));
  }
  return {std::move(xs), std::move(fs)};
}

template <std::floating_point Real = double>
Objective<Real> table_objective_from_csv(const std::string& path,
                                         std::optional<Interval<Real>> domain = {}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open table file '" + path + "'");
  auto [xs, fs] = read_table_csv<Real>(in);
  std::vector<Real> flat;
  flat.reserve(2 * xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    flat.push_back(xs[i]);
    flat.push_back(fs[i]);
  }
  return builtin_objective<Real>("custom-table", std::span<const Real>(flat), domain);
}

}  // namespace cbo
