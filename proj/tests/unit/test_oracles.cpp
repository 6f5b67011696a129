#include <gtest/gtest.h>

#include <cmath>

#include "gradopt/oracles.hpp"
#include "gradopt/smoothing.hpp"
#include "gradopt/testbed.hpp"

using namespace gradopt;

namespace {

std::shared_ptr<FunctionObjective> linear(const Vec& a) {
  return std::make_shared<FunctionObjective>(
      a.size(), [a](const Vec& x) { return a.dot(x); }, [a](const Vec&) { return a; }, a.norm(),
      100.0, 10.0);
}

// Mean of n draws is within 3 standard errors of target, per coordinate.
void expect_unbiased(SmoothedOracle& o, const Vec& x, const Vec& target, int n) {
  const int d = static_cast<int>(x.size());
  Vec sum = Vec::Zero(d), sq = Vec::Zero(d), g(d);
  for (int i = 0; i < n; ++i) {
    o.query(x, g);
    sum += g;
    sq += g.cwiseProduct(g);
  }
  for (int k = 0; k < d; ++k) {
    double mean = sum[k] / n, se = std::sqrt(std::max(0.0, sq[k] / n - mean * mean) / n);
    EXPECT_LE(std::abs(mean - target[k]), 3 * se + 1e-12) << "coord " << k;
  }
}

}  // namespace

TEST(GradientOracle, LinearIsExact) {
  Vec a = (Vec(2) << 1.5, -2.0).finished();
  auto f = linear(a);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sgo_g(*f, Vec::Zero(2), 0.5, rng), a);
}

TEST(GradientOracle, HalfSquaredDrawsAreDeltaU) {
  auto f = std::make_shared<FunctionObjective>(
      3, [](const Vec& x) { return 0.5 * x.squaredNorm(); }, [](const Vec& x) { return x; }, 5.0,
      5.0, 5.0);
  Rng rng(2);
  SmoothedOracle o(Flavor::GradientBased, *f, 0.4, rng);
  for (int i = 0; i < 1000; ++i) ASSERT_LE(o.query(Vec::Zero(3)).norm(), 0.4 + 1e-15);
  expect_unbiased(o, Vec::Zero(3), Vec::Zero(3), 1000000);
}

TEST(GradientOracle, UnbiasedOnTestbed) {
  Testbed tb = testbed_1d();
  Vec x = Vec::Constant(1, 1.0);
  Vec ref = reference_smoothed_gradient(*tb.objective, x, 0.5);
  Rng rng(3);
  SmoothedOracle o(Flavor::GradientBased, *tb.objective, 0.5, rng);
  expect_unbiased(o, x, ref, 1000000);
}

TEST(ValueOracle, ConstantIsZeroMean) {
  auto f = std::make_shared<FunctionObjective>(
      2, [](const Vec&) { return 3.0; }, [](const Vec&) { return Vec::Zero(2); }, 1.0, 3.0, 5.0);
  Rng rng(4);
  SmoothedOracle o(Flavor::ValueBased, *f, 0.5, rng);
  for (int i = 0; i < 1000; ++i) ASSERT_NEAR(o.query(Vec::Zero(2)).norm(), 2 * 3.0 / 0.5, 1e-12);
  expect_unbiased(o, Vec::Zero(2), Vec::Zero(2), 1000000);
}

TEST(ValueOracle, LinearRecoversSlope) {
  Vec a = (Vec(2) << 0.7, -0.2).finished();
  auto f = linear(a);
  Rng rng(5);
  SmoothedOracle o(Flavor::ValueBased, *f, 0.1, rng);
  expect_unbiased(o, Vec::Zero(2), a, 1000000);
}

TEST(ValueOracle, UnbiasedOnTestbed) {
  Testbed tb = testbed_1d();
  Vec x = Vec::Constant(1, 1.0);
  Vec ref = reference_smoothed_gradient(*tb.objective, x, 0.5);
  Rng rng(6);
  SmoothedOracle o(Flavor::ValueBased, *tb.objective, 0.5, rng);
  expect_unbiased(o, x, ref, 1000000);
}

TEST(DeclaredBound, Values) {
  auto f = std::make_shared<FunctionObjective>(
      2, [](const Vec&) { return 0.0; }, [](const Vec&) { return Vec::Zero(2); }, 1.0, 5.0, 5.0);
  EXPECT_DOUBLE_EQ(declared_bound(Flavor::GradientBased, *f, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(declared_bound(Flavor::ValueBased, *f, 0.5), 20.0);

  auto g = std::make_shared<FunctionObjective>(
      4, [](const Vec&) { return 0.0; }, [](const Vec&) { return Vec::Zero(4); }, 1.5, 5.0, 5.0);
  auto noisy = make_noisy(g, {NoiseModel::Kind::UniformGradient, 0.3, 1});
  EXPECT_DOUBLE_EQ(declared_bound(Flavor::GradientBased, *noisy, 0.5), 1.5 + 2 * 0.3);
}

TEST(SmoothedOracle, RejectsBadRadius) {
  Testbed tb = testbed_1d();
  Rng rng(7);
  EXPECT_THROW(SmoothedOracle(Flavor::ValueBased, *tb.objective, 0.0, rng), InvalidArgument);
  EXPECT_THROW(SmoothedOracle(Flavor::GradientBased, *tb.objective, -1.0, rng), InvalidArgument);
  EXPECT_THROW(SmoothedOracle(Flavor::GradientBased, *tb.objective, 1e3, rng), InvalidArgument);
  EXPECT_NO_THROW(SmoothedOracle(Flavor::GradientBased, *tb.objective, 0.0, rng));
}
