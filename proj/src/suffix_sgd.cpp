#include "gradopt/suffix_sgd.hpp"

#include <cmath>

namespace gradopt {

namespace {
void check_p(double p) {
  if (!(p > 0.0 && p < std::exp(-1.0)))
    throw InvalidArgument("confidence p must lie in (0, 1/e)");
}
}  // namespace

SgdResult suffix_sgd(const SgdConfig& cfg, SmoothedOracle& oracle, const StepObserver& observer,
                     bool keep_iterates) {
  const long long T = cfg.total_steps;
  require(T >= 2 && T % 2 == 0, "suffix_sgd: total_steps must be even and at least 2");
  require(cfg.sigma > 0, "suffix_sgd: sigma must be positive");
  require(cfg.x1.size() == cfg.set.dim(), "suffix_sgd: x1 has the wrong dimension");
  require(cfg.set.contains(cfg.x1), "suffix_sgd: x1 must lie in the decision set");

  const long long half = T / 2;
  Vec x = cfg.x1, g(x.size()), sum = Vec::Zero(x.size());
  SgdResult res;
  if (keep_iterates) res.iterates.reserve(static_cast<size_t>(T));
  for (long long t = 1; t <= T; ++t) {
    if (keep_iterates) res.iterates.push_back(x);
    if (t > half) sum += x;
    oracle.query(x, g);
    const double eta = 1.0 / (cfg.sigma * static_cast<double>(t));
    if (observer) observer(t, x, g, eta);
    x -= eta * g;
    project_inplace(cfg.set, x);
    if (!x.allFinite())
      throw NumericalFailure("suffix_sgd: non-finite iterate at step " + std::to_string(t));
  }
  res.suffix_average = sum / static_cast<double>(T - half);
  if (!cfg.set.contains(res.suffix_average, 0.0)) project_inplace(cfg.set, res.suffix_average);
  res.query_count = T;
  return res;
}

double required_steps_base(double G, double sigma, double eps, double p) {
  require(G > 0 && sigma > 0 && eps > 0, "required_steps: G, sigma and eps must be positive");
  check_p(p);
  const double k = 12480.0 * G * G / (sigma * eps);
  return k * std::log(2.0 / p + 2.0 * std::log(k));
}

long long round_up_even(double steps) {
  require(std::isfinite(steps) && steps < 0x1p62, "step count does not fit in 64 bits");
  long long n = static_cast<long long>(std::ceil(steps));
  if (n < 2) n = 2;
  return n + (n % 2);
}

long long required_steps(double G, double sigma, double eps, double p, double scale) {
  require(scale > 0, "required_steps: scale must be positive");
  return round_up_even(scale * required_steps_base(G, sigma, eps, p));
}

double rate_bound(double G, double sigma, long long T, double p) {
  check_p(p);
  return 6240.0 * std::log(2.0 * std::log(static_cast<double>(T)) / p) * G * G /
         (sigma * static_cast<double>(T));
}

RateReport check_rate_bound(const std::vector<double>& excess, double G, double sigma, long long T,
                            double p) {
  RateReport r;
  r.runs = static_cast<int>(excess.size());
  r.bound = rate_bound(G, sigma, T, p);
  for (double e : excess)
    if (e > r.bound) ++r.violations;
  r.allowed = p * r.runs + 1.96 * std::sqrt(r.runs * p * (1.0 - p));
  r.pass = r.violations <= r.allowed;
  return r;
}

}  // namespace gradopt
