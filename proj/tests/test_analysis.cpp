#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cbo/cbo.hpp"

using cbo::builtin_objective;
using cbo::Interval;
using cbo::SimConfig;
namespace an = cbo::analysis;

namespace {

SimConfig<double> two(double lo, double hi) {
  SimConfig<double> cfg;
  cfg.initial_positions = {lo, hi};
  return cfg;
}

}  // namespace

// Reference values below were computed independently at 50-digit precision.

TEST(Oracles, LinearTwoParticle) {
  EXPECT_NEAR(an::oracle_linear_error(1.0, 1.0), 0.379885493041722475, 1e-16);
  EXPECT_NEAR(an::oracle_linear_error(10.0, 1.0), 0.0693101781660728445, 1e-17);
  EXPECT_NEAR(an::oracle_linear_error(1000.0, 1.0), 0.000693147180559945309, 1e-19);
  // Width scales as f(x) = x on [0, w] equals w * (x on [0, 1]) with alpha w.
  EXPECT_NEAR(an::oracle_linear_error(5.0, 2.0), 2 * an::oracle_linear_error(10.0, 1.0), 1e-15);
  EXPECT_THROW(an::oracle_linear_error(0.0, 1.0), std::invalid_argument);
}

TEST(Oracles, NParticleLinear) {
  EXPECT_NEAR(an::oracle_nparticle_linear_error(5.0, 4, 2, 1.0), 0.137286366414165448, 1e-15);
  EXPECT_NEAR(an::oracle_nparticle_linear_error(5.0, 2, 1, 1.0), 0.137286366414165448, 1e-15);
  EXPECT_NEAR(an::oracle_nparticle_linear_error(5.0, 4, 1, 1.0), 0.273256421552052722, 1e-15);
  EXPECT_NEAR(an::oracle_nparticle_linear_error(5.0, 8, 1, 1.0), 0.406670885684317201, 1e-15);
  EXPECT_NEAR(an::oracle_nparticle_linear_error(5.0, 16, 1, 1.0), 0.535261401998597498, 1e-15);
  EXPECT_NEAR(an::oracle_nparticle_linear_error(5.0, 32, 1, 1.0), 0.655208921047507848, 1e-15);
  EXPECT_NEAR(an::oracle_nparticle_linear_error(3.0, 2, 1, 1.0), an::oracle_linear_error(3.0, 1.0),
              1e-16);
  EXPECT_THROW(an::oracle_nparticle_linear_error(5.0, 4, 4, 1.0), std::invalid_argument);
  EXPECT_THROW(an::oracle_nparticle_linear_error(5.0, 1, 1, 1.0), std::invalid_argument);
}

TEST(Oracles, QuadraticBounds) {
  const auto q = an::oracle_quadratic_bounds(100.0, 1.0);
  EXPECT_NEAR(q.upper, 0.0588705011257737346, 1e-16);
  EXPECT_NEAR(q.lower, 0.0221556731363189503, 1e-16);
  const auto far = an::oracle_quadratic_bounds(1e12, 1.0);
  EXPECT_NEAR(far.upper / far.lower, 2.65712988107184, 1e-9);
}

TEST(Oracles, LipschitzSeparation) {
  EXPECT_NEAR(an::lipschitz_separation_bound(10.0, 2.0), 0.0346573590279972655, 1e-17);
  EXPECT_THROW(an::lipschitz_separation_bound(10.0, 0.0), std::invalid_argument);
}

TEST(Oracles, QuadraticRunLiesBetweenBounds) {
  const auto obj = builtin_objective<double>("quadratic");
  for (double alpha : {1e2, 1e4, 1e6}) {
    auto cfg = two(0, 1);
    cfg.alpha = alpha;
    const double err = cbo::reduced_two_particle(obj, cfg).x_inf_estimate;
    const auto q = an::oracle_quadratic_bounds(alpha, 1.0);
    EXPECT_GE(err, q.lower) << alpha;
    EXPECT_LE(err, q.upper) << alpha;
  }
}

TEST(Fit, ExactLineAndNoise) {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = an::fit_line(std::span<const double>(x), std::span<const double>(y));
  EXPECT_NEAR(f.slope, 2, 1e-14);
  EXPECT_NEAR(f.intercept, 1, 1e-14);
  EXPECT_NEAR(f.slope_stderr, 0, 1e-14);
  const std::vector<double> yn{1, 3.1, 4.9, 7};
  const auto g = an::fit_line(std::span<const double>(x), std::span<const double>(yn));
  EXPECT_NEAR(g.slope, 1.98, 1e-12);
  EXPECT_GT(g.slope_stderr, 0);
  const std::vector<double> one{1};
  EXPECT_THROW(an::fit_line(std::span<const double>(one), std::span<const double>(one)),
               std::invalid_argument);
}

TEST(Calyx, QuadraticOnSymmetricDomain) {
  const auto obj = builtin_objective<double>("quadratic", {}, Interval<double>{-1, 1});
  const auto c = an::certify_calyx(obj);
  EXPECT_NEAR(c.curvature_at_minimizer, 2, 1e-6);
  EXPECT_NEAR(c.r1, 1, 1e-12);
  EXPECT_NEAR(c.f1, 1, 1e-12);
  EXPECT_NEAR(c.delta, 1, 1e-12);
  // C1 is a finite-difference estimate, good to about 1e-5 relative.
  EXPECT_NEAR(c.r2, std::sqrt(0.5), 1e-4);
  EXPECT_NEAR(c.c2, 0.5, 1e-12);
  EXPECT_NEAR(c.alpha0 * c.r2 * c.c2, 1, 1e-12);
  EXPECT_NEAR(c.bound(100), std::numbers::ln2 / 50 + std::sqrt(std::numbers::ln2 / 200), 1e-5);
}

TEST(Calyx, DoubleWell) {
  const auto c = an::certify_calyx(builtin_objective<double>("double-well"));
  EXPECT_NEAR(c.x_star, 0.75, 1e-12);
  EXPECT_LE(c.r2, c.r1);
  EXPECT_GT(c.delta, 0);
  EXPECT_NEAR(c.alpha0 * c.r2 * c.c2, 1, 1e-12);
  EXPECT_NEAR(c.alpha0, 395.4, 1.0);
  EXPECT_TRUE(c.applies(400));
  EXPECT_FALSE(c.applies(300));
  EXPECT_LE(c.bound(1e6) * std::sqrt(1e6), c.sqrt_rate_constant() + 1e-12);
}

TEST(Calyx, HypothesisViolations) {
  EXPECT_THROW(an::certify_calyx(builtin_objective<double>("quartic")), cbo::hypothesis_error);
  EXPECT_THROW(an::certify_calyx(builtin_objective<double>("linear")), std::invalid_argument);
  EXPECT_THROW(an::certify_calyx(builtin_objective<double>("quadratic")), std::invalid_argument);
}

TEST(Sweep, LinearAlphaRate) {
  const auto obj = builtin_objective<double>("linear");
  const std::vector<double> alphas{10, 100, 1000, 10000};
  const auto r = an::sweep_alpha(obj, two(0, 1), alphas, 2);
  ASSERT_EQ(r.rows.size(), 4u);
  ASSERT_TRUE(r.fitted_slope);
  EXPECT_NEAR(*r.fitted_slope, -1, 0.01);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.bound_upper);
    EXPECT_LE(row.abs_error, *row.bound_upper);
  }
}

TEST(Sweep, ResultsIndependentOfJobCount) {
  const auto obj = builtin_objective<double>("double-well");
  const std::vector<double> alphas{1, 10, 100, 1000};
  const auto a = an::sweep_alpha(obj, two(0.1, 0.9), alphas, 1);
  const auto b = an::sweep_alpha(obj, two(0.1, 0.9), alphas, 4);
  for (std::size_t i = 0; i < alphas.size(); ++i) EXPECT_EQ(a.rows[i].x_inf, b.rows[i].x_inf);
}

TEST(Sweep, RejectsBadGrid) {
  const auto obj = builtin_objective<double>("linear");
  const std::vector<double> down{10, 1}, zero{0, 1};
  EXPECT_THROW(an::sweep_alpha(obj, two(0, 1), down), std::invalid_argument);
  EXPECT_THROW(an::sweep_alpha(obj, two(0, 1), zero), std::invalid_argument);
}

TEST(Sweep, ParticleCountMatchesOracle) {
  const std::vector<int> ns{2, 4, 8};
  const auto r = an::sweep_n(5.0, 1.0, ns, 1, SimConfig<double>{}, 0);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) EXPECT_NEAR(row.abs_error, *row.oracle, 1e-8);
  ASSERT_TRUE(r.fitted_slope);
  EXPECT_GT(*r.fitted_slope, 0);
}

TEST(Sweep, CsvLayout) {
  const std::vector<int> ns{2, 4};
  const auto r = an::sweep_n(5.0, 1.0, ns, 1, SimConfig<double>{}, 1);
  std::ostringstream os;
  an::write_sweep_csv(os, r);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("param,x_inf,abs_error,bound_lower,bound_upper,oracle,oracle_mismatch\n", 0),
            0u);
  EXPECT_NE(s.find("# fitted_slope="), std::string::npos);
}

TEST(Verify, PassesOnHealthyRun) {
  const auto obj = builtin_objective<double>("rastrigin1d");
  SimConfig<double> cfg;
  cfg.alpha = 3;
  cfg.initial_positions = {-4, -1, 0.5, 3};
  const auto rep = an::verify_invariants(obj, cfg);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.worst_residual;
  EXPECT_TRUE(rep.all_passed());
  EXPECT_EQ(rep.checks.size(), 5u);
  EXPECT_GT(rep.samples, 1u);
}

TEST(Verify, EulerUsesLooserGapThreshold) {
  const auto obj = builtin_objective<double>("double-well");
  SimConfig<double> cfg;
  cfg.alpha = 10;
  cfg.integrator = cbo::Integrator::euler;
  cfg.dt = 0.01;
  cfg.initial_positions = {0.1, 0.9};
  const auto rep = an::verify_invariants(obj, cfg);
  EXPECT_TRUE(rep.all_passed());
  EXPECT_NEAR(rep.checks[0].threshold, 0.01 * 0.8, 1e-15);
}
