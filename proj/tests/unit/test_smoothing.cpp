#include <gtest/gtest.h>

#include <cmath>

#include "gradopt/smoothing.hpp"
#include "gradopt/testbed.hpp"

using namespace gradopt;

namespace {

std::shared_ptr<FunctionObjective> linear(const Vec& a) {
  return std::make_shared<FunctionObjective>(
      a.size(), [a](const Vec& x) { return a.dot(x); }, [a](const Vec&) { return a; }, a.norm(),
      100.0, 10.0);
}

std::shared_ptr<FunctionObjective> half_sq(int d) {
  return std::make_shared<FunctionObjective>(
      d, [](const Vec& x) { return 0.5 * x.squaredNorm(); }, [](const Vec& x) { return x; }, 10.0,
      100.0, 10.0);
}

std::shared_ptr<FunctionObjective> abs1() {
  return std::make_shared<FunctionObjective>(
      1, [](const Vec& x) { return std::abs(x[0]); },
      [](const Vec& x) { return Vec::Constant(1, x[0] > 0 ? 1.0 : (x[0] < 0 ? -1.0 : 0.0)); }, 1.0,
      100.0, 10.0, 0.01);
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double s0 = 0, s14 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s14 += w[i] * std::pow(x[i], 14);
  }
  EXPECT_NEAR(s0, 2.0, 1e-14);
  EXPECT_NEAR(s14, 2.0 / 15.0, 1e-14);
}

TEST(ReferenceSmoother, LinearIsUnchanged) {
  for (int d = 1; d <= 3; ++d) {
    Vec a = Vec::LinSpaced(d, 0.5, -1.5);
    auto f = linear(a);
    Vec x = Vec::Constant(d, 0.3);
    EXPECT_NEAR(reference_smoothed_value(*f, x, 0.7), a.dot(x), 1e-12);
    Vec g = reference_smoothed_gradient(*f, x, 0.7);
    EXPECT_LT((g - a).norm(), 1e-12);
  }
}

TEST(ReferenceSmoother, AbsoluteValueAtZero) {
  auto f = abs1();
  for (double delta : {0.1, 0.5, 2.0})
    EXPECT_NEAR(reference_smoothed_value(*f, Vec::Zero(1), delta), delta / 2, 1e-9 * delta);
}

TEST(ReferenceSmoother, SquaredNormMoment) {
  // E|u|^2 = d/(d+2); for f = |x|^2, d = 2, delta = 1 that is 1/2.
  auto f = half_sq(2);
  EXPECT_NEAR(2 * reference_smoothed_value(*f, Vec::Zero(2), 1.0), 0.5, 1e-12);
  auto f3 = half_sq(3);
  EXPECT_NEAR(2 * reference_smoothed_value(*f3, Vec::Zero(3), 1.0), 0.6, 1e-12);
}

TEST(ReferenceSmoother, HalfSquaredGradientIsIdentity) {
  for (int d = 1; d <= 3; ++d) {
    auto f = half_sq(d);
    Vec x = Vec::LinSpaced(d, -0.4, 0.9);
    for (double delta : {0.05, 1.0, 3.0}) {
      EXPECT_LT((reference_smoothed_gradient(*f, x, delta) - x).norm(), 1e-12);
      const double shift = delta * delta * d / (2.0 * (d + 2));
      EXPECT_NEAR(reference_smoothed_value(*f, x, delta), 0.5 * x.squaredNorm() + shift, 1e-12);
    }
  }
}

TEST(ReferenceSmoother, EvenFunctionGradientAtZero) {
  auto f = half_sq(3);
  EXPECT_LT(reference_smoothed_gradient(*f, Vec::Zero(3), 0.8).norm(), 1e-14);
}

TEST(ReferenceSmoother, RejectsRadiusBeyondMargin) {
  auto f = abs1();
  EXPECT_THROW(reference_smoothed_value(*f, Vec::Zero(1), 11.0), InvalidArgument);
  EXPECT_THROW(reference_smoothed_value(*f, Vec::Zero(1), -1.0), InvalidArgument);
  EXPECT_EQ(reference_smoothed_value(*f, Vec::Constant(1, -3.0), 0.0), 3.0);
}

TEST(ReferenceSmoother, AgreesWithMonteCarloOnTestbeds) {
  for (const char* name : {"testbed1d", "testbed2d"}) {
    Testbed tb = make_testbed(name);
    Rng rng(21);
    for (int k = 0; k < 4; ++k) {
      Vec x = sample_uniform(tb.set, rng);
      const double delta = 0.3 + 0.2 * k;
      McValue mc = mc_smoothed_value(*tb.objective, x, delta, 400000, 100 + k);
      EXPECT_LE(std::abs(reference_smoothed_value(*tb.objective, x, delta) - mc.mean),
                4 * mc.std_error + 1e-12)
          << name;
    }
  }
}

TEST(BiasBound, AbsoluteValueRatioIsHalf) {
  auto f = abs1();
  std::vector<Vec> grid;
  for (int i = -50; i <= 50; ++i) grid.push_back(Vec::Constant(1, i / 10.0));
  BiasReport r = check_bias_bound(*f, 0.5, grid);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.max_ratio, 0.5, 1e-9);
  EXPECT_NEAR(r.worst[0], 0.0, 1e-12);
}

TEST(BiasBound, LinearRatioIsZero) {
  auto f = linear(Vec::Constant(2, 1.0));
  std::vector<Vec> grid{Vec::Zero(2), Vec::Constant(2, 0.5)};
  EXPECT_LT(check_bias_bound(*f, 1.0, grid).max_ratio, 1e-12);
}
