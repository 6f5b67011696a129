#include "gradopt/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "gradopt/geometry.hpp"

namespace gradopt {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

namespace {

constexpr int kOrder = 8;

// Composite Gauss-Legendre on [0, 1] with the given number of panels.
void composite(int panels, std::vector<double>& t, std::vector<double>& w) {
  std::vector<double> gx, gw;
  gauss_legendre(kOrder, gx, gw);
  t.clear();
  w.clear();
  for (int p = 0; p < panels; ++p) {
    double a = static_cast<double>(p) / panels, h = 1.0 / panels;
    for (int k = 0; k < kOrder; ++k) {
      t.push_back(a + 0.5 * h * (gx[k] + 1.0));
      w.push_back(0.5 * h * gw[k]);
    }
  }
}

int clampi(double v, int lo, int hi) {
  if (!(v < hi)) return hi;
  return std::max(lo, static_cast<int>(std::ceil(v)));
}

BallRule build_rule(int d, int a, int b, int c) {
  BallRule r;
  std::vector<double> t, w;
  if (d == 1) {
    composite(a, t, w);
    const int n = static_cast<int>(t.size());
    r.nodes.resize(1, n);
    r.weights.resize(n);
    for (int k = 0; k < n; ++k) {
      r.nodes(0, k) = 2.0 * t[k] - 1.0;
      r.weights[k] = w[k];
    }
  } else if (d == 2) {
    composite(a, t, w);
    const int nr = static_cast<int>(t.size()), nt = b;
    r.nodes.resize(2, nr * nt);
    r.weights.resize(nr * nt);
    double wsum = 0.0;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        double th = 2.0 * std::numbers::pi * (j + 0.5) / nt;
        int k = i * nt + j;
        r.nodes(0, k) = t[i] * std::cos(th);
        r.nodes(1, k) = t[i] * std::sin(th);
        r.weights[k] = w[i] * t[i];
        wsum += r.weights[k];
      }
    r.weights /= wsum;
  } else {
    composite(a, t, w);
    std::vector<double> mu, wm;
    gauss_legendre(b, mu, wm);
    const int nr = static_cast<int>(t.size()), nm = b, np = c;
    r.nodes.resize(3, nr * nm * np);
    r.weights.resize(nr * nm * np);
    double wsum = 0.0;
    int k = 0;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nm; ++j)
        for (int l = 0; l < np; ++l, ++k) {
          double ph = 2.0 * std::numbers::pi * (l + 0.5) / np;
          double s = std::sqrt(std::max(0.0, 1.0 - mu[j] * mu[j]));
          r.nodes(0, k) = t[i] * s * std::cos(ph);
          r.nodes(1, k) = t[i] * s * std::sin(ph);
          r.nodes(2, k) = t[i] * mu[j];
          r.weights[k] = w[i] * t[i] * t[i] * wm[j];
          wsum += r.weights[k];
        }
    r.weights /= wsum;
  }
  return r;
}

void check_delta(const Objective& obj, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw InvalidArgument("smoothing radius must be non-negative");
  if (delta > obj.domain_margin())
    throw InvalidArgument("smoothing radius " + std::to_string(delta) +
                          " exceeds the objective's domain margin " +
                          std::to_string(obj.domain_margin()));
}

}  // namespace

const BallRule& ball_rule(int d, double delta, double feature_scale) {
  require(d >= 1 && d <= 3, "ball_rule: quadrature supports d <= 3");
  const double q = delta / feature_scale;
  int a, b = 0, c = 0;
  if (d == 1) {
    a = clampi(2.0 * q, 4, 4096);
  } else if (d == 2) {
    a = clampi(q, 2, 64);
    b = 8 * clampi((4.0 * std::numbers::pi * q + 32.0) / 8.0, 4, 64);
  } else {
    a = clampi(q, 2, 16);
    b = clampi(std::numbers::pi * q + 12.0, 16, 64);
    c = 8 * clampi((2.0 * std::numbers::pi * q + 24.0) / 8.0, 4, 16);
  }
  thread_local std::map<std::tuple<int, int, int, int>, BallRule> cache;
  auto key = std::make_tuple(d, a, b, c);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_rule(d, a, b, c)).first;
  return it->second;
}

McValue mc_smoothed_value(const Objective& obj, const Vec& x, double delta, long samples,
                          std::uint64_t seed) {
  check_delta(obj, delta);
  Rng rng(seed, 0x736d6f6f7468ULL);
  Vec u(obj.dim()), y(obj.dim());
  double s = 0.0, s2 = 0.0;
  for (long i = 0; i < samples; ++i) {
    sample_unit_into(UnitKind::Ball, rng, u);
    y = x + delta * u;
    double v = obj.exact().value(y);
    s += v;
    s2 += v * v;
  }
  double n = static_cast<double>(samples), m = s / n;
  double var = std::max(0.0, (s2 - n * m * m) / (n - 1.0));
  return {m, std::sqrt(var / n)};
}

McGradient mc_smoothed_gradient(const Objective& obj, const Vec& x, double delta, long samples,
                                std::uint64_t seed) {
  check_delta(obj, delta);
  const int d = obj.dim();
  Rng rng(seed, 0x736d6f6f7468ULL);
  Vec u(d), y(d), g(d), s = Vec::Zero(d), s2 = Vec::Zero(d);
  for (long i = 0; i < samples; ++i) {
    sample_unit_into(UnitKind::Ball, rng, u);
    y = x + delta * u;
    obj.exact().gradient(y, g);
    s += g;
    s2 += g.cwiseProduct(g);
  }
  double n = static_cast<double>(samples);
  McGradient r;
  r.mean = s / n;
  r.std_error = ((s2 - n * r.mean.cwiseProduct(r.mean)) / (n - 1.0)).cwiseMax(0.0).cwiseSqrt() /
                std::sqrt(n);
  return r;
}

double reference_smoothed_value(const Objective& obj, const Vec& x, double delta) {
  check_delta(obj, delta);
  require(x.size() == obj.dim(), "reference_smoothed_value: dimension mismatch");
  const Objective& f = obj.exact();
  if (delta == 0.0) return f.value(x);
  const int d = obj.dim();
  if (d > 3) return mc_smoothed_value(obj, x, delta, kDefaultMcSamples, 0).mean;
  const BallRule& rule = ball_rule(d, delta, obj.feature_scale());
  Vec y(d);
  double s = 0.0;
  for (Eigen::Index k = 0; k < rule.weights.size(); ++k) {
    y = x + delta * rule.nodes.col(k);
    s += rule.weights[k] * f.value(y);
  }
  return s;
}

Vec reference_smoothed_gradient(const Objective& obj, const Vec& x, double delta) {
  check_delta(obj, delta);
  require(x.size() == obj.dim(), "reference_smoothed_gradient: dimension mismatch");
  const Objective& f = obj.exact();
  const int d = obj.dim();
  Vec g(d);
  if (delta == 0.0) {
    f.gradient(x, g);
    return g;
  }
  if (d > 3) return mc_smoothed_gradient(obj, x, delta, kDefaultMcSamples, 0).mean;
  const BallRule& rule = ball_rule(d, delta, obj.feature_scale());
  Vec y(d), s = Vec::Zero(d);
  for (Eigen::Index k = 0; k < rule.weights.size(); ++k) {
    y = x + delta * rule.nodes.col(k);
    f.gradient(y, g);
    s += rule.weights[k] * g;
  }
  return s;
}

BiasReport check_bias_bound(const Objective& obj, double delta, const std::vector<Vec>& grid) {
  BiasReport rep;
  const double bound = delta * obj.exact().lipschitz();
  for (const Vec& x : grid) {
    double bias = std::abs(reference_smoothed_value(obj, x, delta) - obj.exact().value(x));
    double ratio = bound > 0 ? bias / bound : (bias > 0 ? INFINITY : 0.0);
    if (ratio > rep.max_ratio || rep.worst.size() == 0) {
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (ratio >= rep.max_ratio) rep.worst = x;
    }
    if (bias > bound && rep.pass) {
      rep.pass = false;
      std::ostringstream os;
      os.precision(10);
      os << "bias " << bias << " exceeds delta*L = " << bound << " at x = " << x.transpose();
      rep.message = os.str();
    }
  }
  return rep;
}

}  // namespace gradopt
