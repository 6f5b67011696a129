#pragma once

#include <functional>
#include <vector>

#include "gradopt/geometry.hpp"
#include "gradopt/oracles.hpp"

namespace gradopt {

struct SgdConfig {
  long long total_steps = 2;  // even, >= 2
  double sigma = 1.0;
  DecisionSet set;
  Vec x1;
};

struct SgdResult {
  Vec suffix_average;
  long long query_count = 0;
  std::vector<Vec> iterates;  // x_1..x_T, only when requested
};

// Called once per oracle query with the step index t, the query point x_t,
// the oracle output g_t and the step size used for the update.
using StepObserver = std::function<void(long long t, const Vec& x, const Vec& g, double eta)>;

SgdResult suffix_sgd(const SgdConfig& config, SmoothedOracle& oracle,
                     const StepObserver& observer = nullptr, bool keep_iterates = false);

// (12480 G^2 / (sigma eps)) ln(2/p + 2 ln(12480 G^2 / (sigma eps))), unscaled and unrounded.
double required_steps_base(double G, double sigma, double eps, double p);
// Base times scale, rounded up to the next even integer (at least 2).
long long required_steps(double G, double sigma, double eps, double p, double scale = 1.0);
long long round_up_even(double steps);

// 6240 ln(2 ln(T) / p) G^2 / (sigma T)
double rate_bound(double G, double sigma, long long T, double p);

struct RateReport {
  int runs = 0;
  int violations = 0;
  double bound = 0.0;
  double allowed = 0.0;  // p * runs plus the binomial 95% margin
  bool pass = true;
};

// Counts runs whose excess loss exceeds the high-probability bound.
RateReport check_rate_bound(const std::vector<double>& excess, double G, double sigma, long long T,
                            double p);

}  // namespace gradopt
