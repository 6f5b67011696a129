#include <gtest/gtest.h>

#include <cmath>

#include "gradopt/gradopt.hpp"
#include "gradopt/testbed.hpp"

using namespace gradopt;

namespace {

DecisionSet unit_ball2() { return DecisionSet::ball(Vec::Zero(2), 1.0); }

}  // namespace

TEST(Schedule, WorkedExample) {
  EpochSchedule s = build_schedule(0.5, 0.1, unit_ball2(), 1.0, 1.0, Feedback::Gradient, 0.0, 2);
  EXPECT_DOUBLE_EQ(s.alpha0, 0.25);
  ASSERT_EQ(s.M, 3);
  EXPECT_DOUBLE_EQ(s.epochs[0].delta, 1.0);
  EXPECT_DOUBLE_EQ(s.epochs[1].delta, 0.5);
  EXPECT_DOUBLE_EQ(s.epochs[2].delta, 0.25);
  for (const auto& e : s.epochs) {
    EXPECT_DOUBLE_EQ(e.eps, e.delta * e.delta / 32);
    EXPECT_DOUBLE_EQ(e.p_tilde, 0.1 / 3);
    EXPECT_DOUBLE_EQ(e.shrink_radius, 1.5 * e.delta);
    EXPECT_EQ(e.steps % 2, 0);
  }
}

TEST(Schedule, HalvingEpsAddsOneEpoch) {
  for (double eps : {0.3, 0.05, 0.01}) {
    auto a = build_schedule(eps, 0.1, unit_ball2(), 2.0, 0.5, Feedback::Gradient, 0.0, 2);
    auto b = build_schedule(eps / 2, 0.1, unit_ball2(), 2.0, 0.5, Feedback::Gradient, 0.0, 2);
    EXPECT_EQ(b.M, a.M + 1);
  }
}

TEST(Schedule, ValueFeedbackEpochBudget) {
  // d = 2, C = 5, delta = 0.5, sigma = 1: eps_m = 1/128, G = 20, p_tilde = 0.3 / 3.
  auto s = build_schedule(0.5, 0.3, unit_ball2(), 1.0, 1.0, Feedback::Value, 5.0, 2);
  ASSERT_EQ(s.M, 3);
  ASSERT_DOUBLE_EQ(s.epochs[1].delta, 0.5);
  EXPECT_DOUBLE_EQ(s.epochs[1].eps, 1.0 / 128);
  EXPECT_NEAR(s.epochs[1].base_steps, 2622026474.43286, 1e-3);
}

TEST(Schedule, RejectsBadInputs) {
  EXPECT_THROW(build_schedule(1.0, 0.1, unit_ball2(), 1, 1, Feedback::Gradient, 0, 2), InvalidArgument);
  EXPECT_THROW(build_schedule(0.1, 0.4, unit_ball2(), 1, 1, Feedback::Gradient, 0, 2), InvalidArgument);
  EXPECT_THROW(build_schedule(0.1, 0.1, unit_ball2(), 1, 1, Feedback::Value, 0, 2), InvalidArgument);
}

TEST(Schedule, SingleEpochTotal) {
  auto s = build_schedule(0.9, 0.1, DecisionSet::ball(Vec::Zero(1), 0.1), 1.0, 1.0,
                          Feedback::Gradient, 0.0, 1);
  ASSERT_EQ(s.M, 1);
  EXPECT_EQ(total_rounds(s), s.epochs[0].steps);
}

TEST(Schedule, EnvelopeRatios) {
  auto ratio = [](Feedback fb, double eps) {
    auto a = build_schedule(eps, 0.1, unit_ball2(), 1.0, 1.0, fb, 1.0, 2);
    auto b = build_schedule(eps / 2, 0.1, unit_ball2(), 1.0, 1.0, fb, 1.0, 2);
    return double(total_rounds(b)) / double(total_rounds(a));
  };
  for (double eps : {0.05, 0.01}) {
    EXPECT_GE(ratio(Feedback::Gradient, eps), 3.5);
    EXPECT_LE(ratio(Feedback::Gradient, eps), 4.5);
    EXPECT_GE(ratio(Feedback::Value, eps), 14.0);
    EXPECT_LE(ratio(Feedback::Value, eps), 18.0);
  }
}

TEST(Schedule, OverflowIsReported) {
  auto K = DecisionSet::box(Vec::Constant(1, -10), Vec::Constant(1, 10));
  EXPECT_THROW(build_schedule(1e-4, 0.1, K, 1.0, 0.5, Feedback::Value, 1.0, 1), InvalidArgument);
}

TEST(GradOpt, SingleEpochCoversWholeBall) {
  // M = 1 and x1 at the centre: K_1 = K and the run is one Suffix-SGD pass.
  auto K = DecisionSet::ball(Vec::Zero(1), 0.1);
  auto f = std::make_shared<FunctionObjective>(
      1, [](const Vec& x) { return 0.5 * (x[0] - 0.05) * (x[0] - 0.05); },
      [](const Vec& x) { return Vec::Constant(1, x[0] - 0.05); }, 1.0, 1.0, 1.0);
  Vec x0 = Vec::Zero(1);
  RunOptions opts;
  opts.initial_point = &x0;
  Rng a(4);
  RunResult r = gradopt_g(0.9, 0.1, K, *f, 1.0, a, 1e-3, opts);
  ASSERT_EQ(r.schedule.M, 1);

  Rng b(4);
  SmoothedOracle o(Flavor::GradientBased, *f, r.schedule.epochs[0].delta, b);
  SgdResult s = suffix_sgd({r.schedule.epochs[0].steps, 1.0, K, x0}, o);
  EXPECT_EQ(r.final_point, s.suffix_average);
}

TEST(GradOpt, ConstantObjectiveValueFeedback) {
  auto K = DecisionSet::ball(Vec::Zero(2), 1.0);
  auto f = std::make_shared<FunctionObjective>(
      2, [](const Vec&) { return 2.0; }, [](const Vec&) { return Vec::Zero(2); }, 1.0, 2.0, 2.0);
  Rng rng(5);
  std::vector<Vec> sums;
  std::vector<long long> counts;
  TraceSink sink = [&](const QueryRecord& q) {
    if (static_cast<int>(sums.size()) < q.epoch) {
      sums.push_back(Vec::Zero(2));
      counts.push_back(0);
    }
    EXPECT_NEAR(q.norm, 2 * 2.0 / q.delta, 1e-9);
    ++counts.back();
  };
  RunOptions opts;
  opts.sink = &sink;
  RunResult r = gradopt_v(0.5, 0.1, K, *f, 1.0, 2.0, rng, 1e-4, opts);
  EXPECT_TRUE(K.contains(r.final_point));
  for (size_t m = 0; m < counts.size(); ++m) EXPECT_EQ(counts[m], r.schedule.epochs[m].steps);
  EXPECT_EQ(r.trace.total_rounds, total_rounds(r.schedule));
}

TEST(GradOpt, TraceAccountingAndWarmStart) {
  Testbed tb = testbed_1d();
  Rng rng(6);
  long long last = 0;
  bool contiguous = true;
  TraceSink sink = [&](const QueryRecord& q) {
    contiguous &= q.round == last + 1;
    last = q.round;
  };
  RunOptions opts;
  opts.sink = &sink;
  RunResult r = gradopt_g(0.1, 0.1, tb.set, *tb.objective, tb.spec.sigma, rng, 1e-5, opts);
  EXPECT_TRUE(contiguous);
  EXPECT_EQ(last, r.trace.total_rounds);
  const auto& ep = r.trace.epochs;
  for (size_t m = 0; m < ep.size(); ++m) {
    EXPECT_EQ(ep[m].steps, r.schedule.epochs[m].steps);
    EXPECT_DOUBLE_EQ(ep[m].delta, r.schedule.epochs[m].delta);
    if (m + 1 < ep.size()) EXPECT_EQ(ep[m + 1].start, ep[m].end);
    EXPECT_LE(std::abs(ep[m].end[0] - ep[m].start[0]), 1.5 * ep[m].delta + 1e-9);
  }
  EXPECT_TRUE(tb.set.contains(r.final_point));
}

TEST(GradOpt, Deterministic) {
  Testbed tb = testbed_2d();
  Rng a(8), b(8);
  RunResult ra = gradopt_v(0.2, 0.1, tb.set, *tb.objective, tb.spec.sigma,
                           tb.objective->value_bound(), a, 1e-6);
  RunResult rb = gradopt_v(0.2, 0.1, tb.set, *tb.objective, tb.spec.sigma,
                           tb.objective->value_bound(), b, 1e-6);
  EXPECT_EQ(ra.final_point, rb.final_point);
}

TEST(GradOpt, FirstRadiusBeyondMarginIsConfigError) {
  auto K = DecisionSet::ball(Vec::Zero(1), 10.0);
  auto f = std::make_shared<FunctionObjective>(
      1, [](const Vec& x) { return x[0] * x[0]; }, [](const Vec& x) { return 2 * x; }, 40.0, 100.0, 1.0);
  Rng rng(1);
  EXPECT_THROW(gradopt_g(0.1, 0.1, K, *f, 2.0, rng, 1e-3), ConfigError);
}
