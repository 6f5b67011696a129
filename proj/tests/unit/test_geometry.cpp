#include <gtest/gtest.h>

#include <cmath>

#include "gradopt/geometry.hpp"

using namespace gradopt;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST(Projection, BallIsRadial) {
  auto K = DecisionSet::ball(Vec::Zero(2), 1.0);
  Vec p = project(K, v2(2, 0));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
}

TEST(Projection, BoxInteriorIsFixed) {
  auto K = DecisionSet::box(v2(0, 0), v2(1, 1));
  Vec p = project(K, v2(0.5, 0.5));
  EXPECT_EQ(p, v2(0.5, 0.5));
}

TEST(Projection, IntersectionCorner) {
  auto K = DecisionSet::intersection(Ball{Vec::Zero(2), 1.0}, DecisionSet::box(v2(0, 0), v2(2, 2)));
  Vec p = project(K, v2(2, 2));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(p[0], r, 1e-8);
  EXPECT_NEAR(p[1], r, 1e-8);
}

// Brute-force distance minimization over a fine grid of the feasible set.
TEST(Projection, IntersectionMatchesGridSearch) {
  auto base = DecisionSet::box(v2(-0.2, 0.1), v2(2, 2));
  auto K = DecisionSet::intersection(Ball{v2(0.3, 0.4), 0.8}, base);
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Vec y = v2(4 * rng.uniform() - 2, 4 * rng.uniform() - 2);
    Vec p = project(K, y);
    ASSERT_TRUE(K.contains(p, 1e-8));
    double best = INFINITY;
    const int n = 801;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec z = v2(-0.5 + 2.5 * i / (n - 1), -0.5 + 2.5 * j / (n - 1));
        if (K.contains(z, 0)) best = std::min(best, (z - y).norm());
      }
    EXPECT_LE((p - y).norm(), best + 1e-9);
    EXPECT_GE((p - y).norm(), best - 5e-3);
  }
}

TEST(Projection, IdempotentAndInside) {
  auto K = DecisionSet::box(v2(-1, -2), v2(3, 1));
  Vec p = project(K, v2(10, -10));
  EXPECT_EQ(p, v2(3, -2));
  EXPECT_EQ(project(K, p), p);
}

TEST(Projection, DimensionMismatchThrows) {
  auto K = DecisionSet::ball(Vec::Zero(2), 1.0);
  EXPECT_THROW(project(K, Vec::Zero(3)), InvalidArgument);
}

TEST(Diameter, Shapes) {
  EXPECT_DOUBLE_EQ(diameter(DecisionSet::ball(Vec::Zero(2), 3.0)), 6.0);
  EXPECT_DOUBLE_EQ(diameter(DecisionSet::box(v2(0, 0), v2(3, 4))), 5.0);
  auto K = DecisionSet::intersection(Ball{Vec::Zero(2), 1.0}, DecisionSet::box(v2(0, 0), v2(1, 1)));
  EXPECT_LE(diameter(K), 2.0);
}

TEST(Sampling, ZeroSphereIsPlusMinusOne) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    double s = sample_unit(UnitKind::Sphere, 1, rng).vector[0];
    EXPECT_TRUE(s == 1.0 || s == -1.0);
  }
}

TEST(Sampling, BallMeanIsZero) {
  Rng rng(2);
  const int n = 1000000;
  Vec sum = Vec::Zero(3), sq = Vec::Zero(3), u(3);
  for (int i = 0; i < n; ++i) {
    sample_unit_into(UnitKind::Ball, rng, u);
    ASSERT_LE(u.norm(), 1.0);
    sum += u;
    sq += u.cwiseProduct(u);
  }
  for (int k = 0; k < 3; ++k) {
    double mean = sum[k] / n, se = std::sqrt((sq[k] / n - mean * mean) / n);
    EXPECT_LE(std::abs(mean), 3 * se);
  }
}

TEST(Sampling, SphereSecondMomentIsIdentityOverD) {
  Rng rng(3);
  const int n = 1000000, d = 4;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d), S2 = Eigen::MatrixXd::Zero(d, d);
  Vec v(d);
  for (int i = 0; i < n; ++i) {
    sample_unit_into(UnitKind::Sphere, rng, v);
    ASSERT_NEAR(v.norm(), 1.0, 1e-12);
    Eigen::MatrixXd o = v * v.transpose();
    S += o;
    S2 += o.cwiseProduct(o);
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double mean = S(a, b) / n, se = std::sqrt((S2(a, b) / n - mean * mean) / n);
      EXPECT_LE(std::abs(mean - (a == b ? 0.25 : 0.0)), 3 * se) << a << "," << b;
    }
}

TEST(Sampling, UniformFromSets) {
  Rng rng(4);
  auto box = DecisionSet::box(v2(0, 0), v2(1, 1));
  for (int i = 0; i < 1000; ++i) {
    Vec x = sample_uniform(box, rng);
    EXPECT_TRUE(x.minCoeff() >= 0 && x.maxCoeff() <= 1);
  }
  auto K = DecisionSet::intersection(Ball{Vec::Zero(2), 1.0}, box);
  for (int i = 0; i < 1000; ++i) {
    Vec x = sample_uniform(K, rng);
    EXPECT_TRUE(x.minCoeff() >= 0 && x.norm() <= 1);
  }
  const Vec c = v2(2, -1);
  auto ball = DecisionSet::ball(c, 0.5);
  const int n = 1000000;
  Vec sum = Vec::Zero(2), sq = Vec::Zero(2);
  for (int i = 0; i < n; ++i) {
    Vec x = sample_uniform(ball, rng);
    sum += x;
    sq += x.cwiseProduct(x);
  }
  for (int k = 0; k < 2; ++k) {
    double mean = sum[k] / n, se = std::sqrt((sq[k] / n - mean * mean) / n);
    EXPECT_LE(std::abs(mean - c[k]), 3 * se);
  }
}
