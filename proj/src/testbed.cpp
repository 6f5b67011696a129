#include "gradopt/testbed.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "gradopt/smoothing.hpp"

namespace gradopt {

namespace {

// Frozen from the golden verification reports (tests/golden/*.json), rounded down.
constexpr double kSigma1d = 4.35e-4;
constexpr double kSigma2d = 0.35;

constexpr double kHessianRelTol = 1e-6;
// Rounding allowance for second differences, in units of eps * max|F| / h^2 per entry.
constexpr double kFdRoundoff = 64.0;

struct Bounds {
  Vec lo, hi;
};

Bounds bounds_of(const DecisionSet& set) {
  return std::visit(
      [](const auto& s) -> Bounds {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          Vec r = Vec::Constant(s.center.size(), s.radius);
          return {s.center - r, s.center + r};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {s.lower, s.upper};
        } else {
          Bounds b = bounds_of(*s.base);
          Vec r = Vec::Constant(s.ball.center.size(), s.ball.radius);
          return {b.lo.cwiseMax(s.ball.center - r), b.hi.cwiseMin(s.ball.center + r)};
        }
      },
      set.shape());
}

std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(8);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

Eigen::MatrixXd smoothed_hessian(const Objective& obj, const Vec& x, double delta, double h,
                                 double& max_abs) {
  const int d = obj.dim();
  Eigen::MatrixXd H(d, d);
  max_abs = 0.0;
  auto F = [&](const Vec& y) {
    double v = reference_smoothed_value(obj, y, delta);
    max_abs = std::max(max_abs, std::abs(v));
    return v;
  };
  const double f0 = F(x);
  Vec y = x;
  for (int i = 0; i < d; ++i) {
    y[i] = x[i] + h;
    double fp = F(y);
    y[i] = x[i] - h;
    double fm = F(y);
    y[i] = x[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = 0; j < i; ++j) {
      double s = 0.0;
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          y[i] = x[i] + a * h;
          y[j] = x[j] + b * h;
          s += a * b * F(y);
        }
      y[i] = x[i];
      y[j] = x[j];
      H(i, j) = H(j, i) = s / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace

std::vector<double> halving_ladder(double first, int levels) {
  std::vector<double> v;
  for (int k = 0; k < levels; ++k) v.push_back(k == 0 ? first : v.back() / 2.0);
  return v;
}

Testbed make_sigma_nice_test_function(double sigma, int d, double wobble_amp, double wobble_freq) {
  require(d == 1 || d == 2, "make_sigma_nice_test_function: d must be 1 or 2");
  require(sigma > 0 && std::isfinite(sigma), "make_sigma_nice_test_function: sigma must be positive");
  const double wobble = std::abs(wobble_amp) * wobble_freq * wobble_freq;
  if (!(wobble_freq > 0 && wobble_freq <= kMaxWobbleFreq) || !(wobble <= kMaxWobbleRatio * sigma))
    throw InvalidArgument("wobble parameters outside the admissible range (|A| w^2 <= " +
                          std::to_string(kMaxWobbleRatio) + " sigma, 0 < w <= " +
                          std::to_string(kMaxWobbleFreq) + ")");
  QuadCosParams p;
  p.sigma_prime = sigma + wobble;
  p.amp = wobble_amp;
  p.freq = wobble_freq;
  if (d == 1) {
    p.xstar = Vec::Constant(1, 1.5);
    p.region_center = Vec::Zero(1);
    p.region_radius = 20.0;
    p.margin = 10.0;
  } else {
    p.xstar = (Vec(2) << 0.05, -0.03).finished();
    p.region_center = Vec::Zero(2);
    p.region_radius = 2.0;
    p.margin = 1.0;
  }
  const double rmax = (p.region_center - p.xstar).norm() + p.region_radius;
  p.offset = 0.25 * p.sigma_prime * rmax * rmax;
  Testbed t{"quadcos" + std::to_string(d) + "d", std::make_shared<QuadraticCosine>(p),
            SigmaNiceSpec{sigma, p.xstar, {}},
            d == 1 ? DecisionSet::box(Vec::Constant(1, -10.0), Vec::Constant(1, 10.0))
                   : DecisionSet::ball(Vec::Zero(2), 1.0)};
  t.spec.delta_ladder = halving_ladder(diameter(t.set) / 2.0, 11);
  return t;
}

Testbed testbed_1d() {
  auto obj = std::make_shared<NotchedKink>(NotchedKinkParams{});
  DecisionSet K = DecisionSet::box(Vec::Constant(1, -10.0), Vec::Constant(1, 10.0));
  Vec xstar = global_minimum(*obj, K).x;
  return {"testbed1d", obj, SigmaNiceSpec{kSigma1d, xstar, halving_ladder(10.0, 11)}, K};
}

Testbed testbed_2d() {
  RadialBowlParams p;
  auto obj = std::make_shared<RadialBowl>(p);
  return {"testbed2d", obj, SigmaNiceSpec{kSigma2d, p.xstar, halving_ladder(1.0, 11)},
          DecisionSet::ball(Vec::Zero(2), 1.0)};
}

Testbed wobble_counterexample_1d() {
  QuadCosParams p;
  p.sigma_prime = 1.0;
  p.amp = -10.0;
  p.freq = 2.0;
  p.xstar = Vec::Constant(1, 1.5);
  p.region_center = Vec::Zero(1);
  p.region_radius = 20.0;
  p.margin = 10.0;
  return {"wobble_counterexample", std::make_shared<QuadraticCosine>(p),
          SigmaNiceSpec{1.0, p.xstar, halving_ladder(10.0, 11)},
          DecisionSet::box(Vec::Constant(1, -10.0), Vec::Constant(1, 10.0))};
}

Testbed make_testbed(const std::string& name) {
  if (name == "testbed1d") return testbed_1d();
  if (name == "testbed2d") return testbed_2d();
  if (name == "wobble_counterexample") return wobble_counterexample_1d();
  throw ConfigError("unknown testbed '" + name + "'");
}

MinResult grid_minimize(const std::function<double(const Vec&)>& g, const DecisionSet& set,
                        int points_per_dim) {
  const int d = set.dim();
  require(d <= 2, "grid_minimize: d must be at most 2");
  require(points_per_dim >= 2, "grid_minimize: need at least two points per dimension");
  Bounds b = bounds_of(set);
  Vec h = (b.hi - b.lo) / (points_per_dim - 1);
  MinResult best{Vec(), INFINITY};
  Vec x(d);
  const int total = d == 1 ? points_per_dim : points_per_dim * points_per_dim;
  for (int k = 0; k < total; ++k) {
    x[0] = b.lo[0] + h[0] * (k % points_per_dim);
    if (d == 2) x[1] = b.lo[1] + h[1] * (k / points_per_dim);
    if (!set.contains(x, 0.0)) continue;
    double v = g(x);
    if (v < best.value) best = {x, v};
  }
  if (best.x.size() == 0) throw NumericalFailure("grid_minimize: no grid point inside the set");
  constexpr int kZoom = 10, kRounds = 7;
  for (int round = 0; round < kRounds; ++round) {
    Vec c = best.x;
    const int n = 2 * kZoom + 1, tot = d == 1 ? n : n * n;
    for (int k = 0; k < tot; ++k) {
      x[0] = c[0] + h[0] * ((k % n) - kZoom) / kZoom;
      if (d == 2) x[1] = c[1] + h[1] * ((k / n) - kZoom) / kZoom;
      project_inplace(set, x);
      double v = g(x);
      if (v < best.value) best = {x, v};
    }
    h /= 5.0;
  }
  return best;
}

MinResult smoothed_minimum(const Objective& obj, const DecisionSet& set, double delta) {
  const int n = obj.dim() == 1 ? 4001 : 41;
  return grid_minimize([&](const Vec& x) { return reference_smoothed_value(obj, x, delta); }, set,
                       n);
}

MinResult global_minimum(const Objective& obj, const DecisionSet& set) {
  const Objective& f = obj.exact();
  const int n = obj.dim() == 1 ? 200001 : 401;
  return grid_minimize([&](const Vec& x) { return f.value(x); }, set, n);
}

std::vector<double> local_minima_1d(const Objective& obj, const DecisionSet& set, int n) {
  require(obj.dim() == 1, "local_minima_1d: objective must be 1-d");
  Bounds b = bounds_of(set);
  const Objective& f = obj.exact();
  std::vector<double> out;
  Vec x(1), g(1);
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    x[0] = b.lo[0] + (b.hi[0] - b.lo[0]) * i / (n - 1);
    f.gradient(x, g);
    if (i > 0 && prev < 0 && g[0] >= 0) out.push_back(x[0]);
    prev = g[0];
  }
  return out;
}

NiceReport verify_sigma_nice(const Objective& obj, const SigmaNiceSpec& spec,
                             const DecisionSet& set) {
  const int d = obj.dim();
  require(d <= 2, "verify_sigma_nice: d must be at most 2");
  require(spec.sigma > 0, "verify_sigma_nice: sigma must be positive");
  require(!spec.delta_ladder.empty(), "verify_sigma_nice: empty ladder");
  for (size_t k = 1; k < spec.delta_ladder.size(); ++k)
    require(spec.delta_ladder[k] == spec.delta_ladder[k - 1] / 2.0,
            "verify_sigma_nice: ladder must halve");

  NiceReport rep;
  rep.sigma = spec.sigma;
  std::ostringstream fail;
  fail.precision(8);
  constexpr int kHalf = 30;  // 61 points per axis, spacing delta/10 across the 3-delta ball
  for (size_t k = 0; k < spec.delta_ladder.size(); ++k) {
    const double delta = spec.delta_ladder[k];
    LevelCheck lc;
    lc.delta = delta;
    lc.minimizer = smoothed_minimum(obj, set, delta).x;
    if (k > 0) {
      const LevelCheck& prev = rep.levels.back();
      lc.centering_gap = (prev.minimizer - lc.minimizer).norm();
      lc.centering_ok = lc.centering_gap <= prev.delta / 2.0;
      if (!lc.centering_ok)
        fail << "centering: |x*(" << prev.delta << ") - x*(" << delta << ")| = " << lc.centering_gap
             << " > " << prev.delta / 2.0 << " at witness " << fmt_vec(lc.minimizer) << "; ";
    }
    const double step = delta / 10.0, hfd = std::min(1e-4, 0.01 * delta);
    lc.min_eigenvalue = INFINITY;
    Vec y(d);
    const int n = 2 * kHalf + 1, tot = d == 1 ? n : n * n;
    for (int idx = 0; idx < tot; ++idx) {
      y[0] = lc.minimizer[0] + step * ((idx % n) - kHalf);
      if (d == 2) y[1] = lc.minimizer[1] + step * ((idx / n) - kHalf);
      if ((y - lc.minimizer).norm() > 3.0 * delta + 1e-12 || !set.contains(y, 0.0)) continue;
      double max_abs;
      Eigen::MatrixXd H = smoothed_hessian(obj, y, delta, hfd, max_abs);
      double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly)
                     .eigenvalues()[0];
      lc.roundoff = std::max(lc.roundoff, d * kFdRoundoff * DBL_EPSILON * max_abs / (hfd * hfd));
      ++lc.hessian_points;
      if (e < lc.min_eigenvalue) {
        lc.min_eigenvalue = e;
        lc.witness = y;
      }
    }
    lc.convexity_ok = lc.min_eigenvalue >= spec.sigma * (1.0 - kHessianRelTol) - lc.roundoff;
    if (!lc.convexity_ok)
      fail << "strong convexity at delta = " << delta << ": min eigenvalue " << lc.min_eigenvalue
           << " < sigma = " << spec.sigma << " at witness " << fmt_vec(lc.witness) << "; ";
    rep.pass = rep.pass && lc.centering_ok && lc.convexity_ok;
    rep.levels.push_back(lc);
  }
  rep.failure = fail.str();
  return rep;
}

}  // namespace gradopt
