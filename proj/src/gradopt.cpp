#include "gradopt/gradopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gradopt {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const char* feedback_name(Feedback f) { return f == Feedback::Gradient ? "gradient" : "value"; }

}  // namespace

EpochSchedule build_schedule(double eps, double p, const DecisionSet& set, double L, double sigma,
                             Feedback feedback, double C, int d, double constant_scale) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  if (!(p > 0.0 && p < std::exp(-1.0))) throw InvalidArgument("p must lie in (0, 1/e)");
  require(L > 0 && sigma > 0, "build_schedule: L and sigma must be positive");
  require(constant_scale > 0, "build_schedule: constant_scale must be positive");
  require(d >= 1, "build_schedule: d must be positive");
  if (feedback == Feedback::Value) require(C > 0, "build_schedule: value feedback needs C > 0");

  EpochSchedule s;
  s.feedback = feedback;
  s.diameter = diameter(set);
  s.eps = eps;
  s.p = p;
  s.L = L;
  s.sigma = sigma;
  s.C = C;
  s.d = d;
  s.scale = constant_scale;
  const double D = s.diameter;
  s.alpha0 = std::min(1.0 / (2.0 * L * D), 2.0 * std::sqrt(2.0) / (std::sqrt(sigma) * D));
  s.M = std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / (s.alpha0 * eps)))));
  const double pt = p / s.M;
  double delta = D / 2.0;
  for (int m = 1; m <= s.M; ++m, delta /= 2.0) {
    EpochPlan e;
    e.m = m;
    e.delta = delta;
    e.eps = sigma * delta * delta / 32.0;
    e.shrink_radius = 1.5 * delta;
    e.p_tilde = pt;
    const double G = feedback == Feedback::Gradient ? L : d * C / delta;
    e.base_steps = required_steps_base(G, sigma, e.eps, pt);
    e.steps = round_up_even(constant_scale * e.base_steps);
    s.epochs.push_back(e);
  }
  return s;
}

long long total_rounds(const EpochSchedule& s) {
  long long t = 0;
  for (const auto& e : s.epochs) t += e.steps;
  return t;
}

double rounds_envelope(const EpochSchedule& s) {
  const double sig = s.sigma, L = s.L, eps = s.eps;
  if (s.feedback == Feedback::Gradient) {
    const double mx = std::max(16.0 * L * L, sig / 2.0);
    const double gamma = 2.0 * s.M / s.p + 2.0 * std::log(4e5 * L * L * mx / (sig * sig * eps * eps));
    return 14e4 * L * L * std::log(gamma) / (sig * sig) * mx / (eps * eps);
  }
  const double dc2 = s.d * s.d * s.C * s.C;
  const double mx = std::max(256.0 * std::pow(L, 4), sig * sig / 4.0);
  const double gamma = 2.0 * s.M / s.p + 2.0 * std::log(4e5 * dc2 * mx / (sig * sig * std::pow(eps, 4)));
  return 6e4 * dc2 * std::log(gamma) / (sig * sig) * mx / std::pow(eps, 4);
}

RunResult run_schedule(const EpochSchedule& s, const DecisionSet& set, const Objective& obj, Rng& rng,
                       const RunOptions& opts) {
  require(set.dim() == obj.dim(), "run_schedule: set and objective dimensions differ");
  if (s.epochs.front().delta > obj.domain_margin())
    throw ConfigError("first smoothing radius " + num(s.epochs.front().delta) +
                      " exceeds the objective's domain margin " + num(obj.domain_margin()));

  RunResult r;
  r.schedule = s;
  RunTrace& tr = r.trace;
  tr.seed = opts.seed;
  tr.config = {{"feedback", feedback_name(s.feedback)}, {"eps", num(s.eps)},
               {"p", num(s.p)},       {"sigma", num(s.sigma)},
               {"L", num(s.L)},       {"C", num(s.C)},
               {"M", std::to_string(s.M)}, {"constant_scale", num(s.scale)},
               {"set", set.describe()}};

  Vec x = opts.initial_point ? *opts.initial_point : sample_uniform(set, rng);
  require(set.contains(x), "run_schedule: initial point outside the set");
  const Flavor flavor = s.feedback == Feedback::Gradient ? Flavor::GradientBased : Flavor::ValueBased;
  long long round = 0;
  for (const EpochPlan& e : s.epochs) {
    DecisionSet Km = std::isinf(e.shrink_radius)
                         ? set
                         : DecisionSet::intersection(Ball{x, e.shrink_radius}, set);
    if (!Km.contains(x)) throw NumericalFailure("epoch " + std::to_string(e.m) + ": warm start not in K_m");
    SmoothedOracle oracle(flavor, obj, e.delta, rng);
    StepObserver obs;
    if (opts.sink) {
      const TraceSink& sink = *opts.sink;
      const int m = e.m;
      const double delta = e.delta;
      obs = [&, m, delta](long long t, const Vec& q, const Vec& g, double) {
        sink(QueryRecord{round + t, m, delta, q, g.norm()});
      };
    }
    SgdResult res;
    try {
      res = suffix_sgd(SgdConfig{e.steps, s.sigma, Km, x}, oracle, obs);
    } catch (const NumericalFailure& ex) {
      throw NumericalFailure("epoch " + std::to_string(e.m) + ": " + ex.what(), ex.residual);
    }
    round += res.query_count;
    tr.epochs.push_back(EpochRecord{e.m, e.delta, res.query_count, x, res.suffix_average});
    x = res.suffix_average;
  }
  tr.final_point = x;
  tr.total_rounds = round;
  r.final_point = x;
  return r;
}

RunResult gradopt_g(double eps, double p, const DecisionSet& set, const Objective& obj, double sigma,
                    Rng& rng, double constant_scale, const RunOptions& opts) {
  EpochSchedule s = build_schedule(eps, p, set, obj.lipschitz(), sigma, Feedback::Gradient, 0.0,
                                   obj.dim(), constant_scale);
  return run_schedule(s, set, obj, rng, opts);
}

RunResult gradopt_v(double eps, double p, const DecisionSet& set, const Objective& obj, double sigma,
                    double C, Rng& rng, double constant_scale, const RunOptions& opts) {
  EpochSchedule s = build_schedule(eps, p, set, obj.lipschitz(), sigma, Feedback::Value, C,
                                   obj.dim(), constant_scale);
  return run_schedule(s, set, obj, rng, opts);
}

EpochSchedule fixed_schedule(const DecisionSet& set, Feedback feedback, double sigma, double delta,
                             long long steps, double L, double C, int d) {
  require(sigma > 0, "fixed_schedule: sigma must be positive");
  require(steps >= 1, "fixed_schedule: steps must be positive");
  EpochSchedule s;
  s.feedback = feedback;
  s.M = 1;
  s.diameter = diameter(set);
  s.sigma = sigma;
  s.L = L;
  s.C = C;
  s.d = d;
  EpochPlan e;
  e.m = 1;
  e.delta = delta;
  e.eps = sigma * delta * delta / 32.0;
  e.steps = round_up_even(static_cast<double>(steps));
  e.base_steps = static_cast<double>(e.steps);
  e.shrink_radius = std::numeric_limits<double>::infinity();
  s.epochs.push_back(e);
  return s;
}

RunResult fixed_delta_sgd(const DecisionSet& set, const Objective& obj, Feedback feedback,
                          double sigma, double delta, long long steps, Rng& rng,
                          const RunOptions& opts) {
  return run_schedule(fixed_schedule(set, feedback, sigma, delta, steps, obj.lipschitz(),
                                     obj.value_bound(), obj.dim()),
                      set, obj, rng, opts);
}

}  // namespace gradopt
