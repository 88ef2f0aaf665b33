#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "cbo/objective.hpp"

using cbo::builtin_objective;
using cbo::Interval;

namespace {

// Naive exp(-alpha f) normalization in long double; no shift, so it is an
// independent check of the stabilized path wherever it does not underflow.
std::vector<long double> naive_weights(const std::vector<double>& f, long double alpha) {
  std::vector<long double> w(f.size());
  long double sum = 0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += (w[i] = std::exp(-alpha * f[i]));
  for (auto& v : w) v /= sum;
  return w;
}

}  // namespace

TEST(Weights, LinearTwoParticlesAlphaOne) {
  const auto obj = builtin_objective<double>("linear");
  const std::vector<double> x{0.0, 1.0};
  const auto w = cbo::weights(obj, 1.0, x);
  // 1 / (1 + e^-1) and e^-1 / (1 + e^-1), 18 digits.
  EXPECT_NEAR(w[0], 0.731058578630004879, 1e-15);
  EXPECT_NEAR(w[1], 0.268941421369995121, 1e-15);
  EXPECT_NEAR(cbo::consensus_point(x, w), 0.268941421369995121, 1e-15);
}

TEST(Weights, AlphaZeroIsUniform) {
  const auto obj = builtin_objective<double>("rastrigin1d");
  const std::vector<double> x{-4, -1, 0.3, 2, 5};
  const auto w = cbo::weights(obj, 0.0, x);
  for (double v : w) EXPECT_EQ(v, 1.0 / 5);
  EXPECT_NEAR(cbo::consensus_point(x, w), 0.46, 1e-15);
}

TEST(Weights, MatchesLongDoubleAtLargeAlpha) {
  const auto obj = builtin_objective<double>("quadratic");
  const std::vector<double> x{0.0, 0.01, 0.02, 0.05};
  const std::vector<double> f{0.0, 1e-4, 4e-4, 2.5e-3};
  const auto w = cbo::weights(obj, 1e6, x);
  const auto ref = naive_weights(f, 1e6L);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_NEAR(w[i], static_cast<double>(ref[i]), 1e-15 * std::max(1.0, double(ref[i])));
}

TEST(Weights, NoUnderflowWhereRawExponentialsVanish) {
  const auto obj = builtin_objective<double>("shifted-quadratic", {0.5, 1000.0});
  const std::vector<double> x{0.9, 0.95, 1.0};
  const auto w = cbo::weights(obj, 1e6, x);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_EQ(w[1], 0.0);
  EXPECT_EQ(w[2], 0.0);
}

TEST(Weights, SimplexShiftAndScaleProperties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-5.12, 5.12), log_alpha(-3, 6);
  const auto obj = builtin_objective<double>("rastrigin1d");
  cbo::Objective<double> shifted = obj;
  shifted.eval = [&](double x) { return obj.eval(x) + 123.0; };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(2 + trial % 7);
    for (auto& v : x) v = pos(rng);
    const double alpha = std::pow(10.0, log_alpha(rng));
    const auto w = cbo::weights(obj, alpha, x);
    double sum = 0;
    for (double v : w) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    const auto ws = cbo::weights(shifted, alpha, x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(w[i], ws[i], 1e-12);
    const double m = cbo::consensus_point(x, w);
    EXPECT_GE(m, *std::min_element(x.begin(), x.end()));
    EXPECT_LE(m, *std::max_element(x.begin(), x.end()));
  }
}

TEST(Weights, ScalingFIsScalingAlpha) {
  const auto f1 = builtin_objective<double>("shifted-quadratic", {0.3, 1.0});
  const auto f5 = builtin_objective<double>("shifted-quadratic", {0.3, 5.0});
  const std::vector<double> x{0.0, 0.2, 0.7, 1.0};
  const auto a = cbo::weights(f5, 3.0, x);
  const auto b = cbo::weights(f1, 15.0, x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
}

TEST(Weights, RejectsBadInput) {
  const auto obj = builtin_objective<double>("linear");
  const std::vector<double> empty, inside{0.5}, outside{1.5};
  EXPECT_THROW(cbo::weights(obj, 1.0, empty), std::invalid_argument);
  EXPECT_THROW(cbo::weights(obj, -1.0, inside), std::invalid_argument);
  EXPECT_THROW(cbo::weights(obj, std::nan(""), inside), std::invalid_argument);
  EXPECT_THROW(cbo::weights(obj, 1.0, outside), std::out_of_range);
}

TEST(Builtins, CatalogMinimaAndDomains) {
  struct Case {
    const char* name;
    double x_star;
    double lo, hi;
  };
  for (const Case& c : {Case{"linear", 0, 0, 1}, Case{"quadratic", 0, 0, 1},
                        Case{"double-well", 0.75, 0, 1}, Case{"rastrigin1d", 0, -5.12, 5.12},
                        Case{"quartic", 0, -1, 1}}) {
    SCOPED_TRACE(c.name);
    const auto obj = builtin_objective<double>(c.name);
    ASSERT_TRUE(obj.known_minimizer);
    EXPECT_NEAR(*obj.known_minimizer, c.x_star, 1e-12);
    EXPECT_EQ(obj.domain_lo, c.lo);
    EXPECT_EQ(obj.domain_hi, c.hi);
    EXPECT_NEAR(obj(*obj.known_minimizer), 0.0, 1e-9);
    for (int k = 0; k <= 200; ++k) {
      const double x = c.lo + (c.hi - c.lo) * k / 200.0;
      EXPECT_GE(obj(x), obj(*obj.known_minimizer) - 1e-12);
    }
  }
}

TEST(Builtins, LinearSlopeSignPicksEndpoint) {
  const auto up = builtin_objective<double>("linear", {2.0});
  const auto down = builtin_objective<double>("linear", {-2.0});
  EXPECT_EQ(*up.known_minimizer, 0.0);
  EXPECT_EQ(*down.known_minimizer, 1.0);
  EXPECT_NEAR(up(0.25), 0.5, 1e-15);
  EXPECT_NEAR(down(0.25), 1.5, 1e-15);
}

TEST(Builtins, ShiftedQuadraticNeedsCenterInside) {
  EXPECT_NEAR(*builtin_objective<double>("shifted-quadratic", {0.4}).known_minimizer, 0.4, 0);
  EXPECT_THROW(builtin_objective<double>("shifted-quadratic", {2.0}), std::invalid_argument);
  EXPECT_THROW(builtin_objective<double>("no-such-family"), std::invalid_argument);
}

TEST(Builtins, DoubleWellHasTwoWells) {
  const auto obj = builtin_objective<double>("double-well");
  EXPECT_GT(obj(0.25), 0.0);  // the shallower well
  EXPECT_LT(obj(0.25), obj(0.45));
  ASSERT_TRUE(obj.lipschitz_hint);
  for (int k = 0; k < 100; ++k) {
    const double x = k / 100.0, h = 1e-6;
    EXPECT_LE(std::abs(obj(x + h) - obj(x)) / h, *obj.lipschitz_hint);
  }
}

TEST(Builtins, CustomTableInterpolates) {
  const auto obj = builtin_objective<double>("custom-table", {0.0, 2.0, 1.0, 0.5, 2.0, 3.0});
  EXPECT_EQ(obj.domain_lo, 0.0);
  EXPECT_EQ(obj.domain_hi, 2.0);
  EXPECT_NEAR(obj(0.5), 1.25, 1e-15);
  EXPECT_NEAR(obj(1.5), 1.75, 1e-15);
  EXPECT_EQ(*obj.known_minimizer, 1.0);
  EXPECT_THROW(builtin_objective<double>("custom-table", {1.0, 0.0, 0.0, 1.0}),
               std::invalid_argument);
}

TEST(Table, CsvWithAndWithoutHeader) {
  std::istringstream with("x,f\n0,1\n1,0\n2,1\n"), without("0 1\n1 0\n2 1\n");
  const auto a = cbo::read_table_csv<double>(with);
  const auto b = cbo::read_table_csv<double>(without);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  std::istringstream bad("0,1\nfoo,bar\n");
  EXPECT_THROW(cbo::read_table_csv<double>(bad), std::invalid_argument);
}

TEST(Table, FromFileWithSubdomain) {
  const auto path = std::filesystem::temp_directory_path() / "cbo_table_test.csv";
  {
    std::ofstream os(path);
    os << "x,f\n-1,1\n0,0\n1,1\n";
  }
  const auto obj = cbo::table_objective_from_csv<double>(path.string(), Interval<double>{-0.5, 1});
  EXPECT_EQ(obj.domain_lo, -0.5);
  EXPECT_EQ(*obj.known_minimizer, 0.0);
  EXPECT_THROW(cbo::table_objective_from_csv<double>(path.string(), Interval<double>{-2, 1}),
               std::invalid_argument);
  std::filesystem::remove(path);
}
