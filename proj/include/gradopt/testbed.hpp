#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gradopt/geometry.hpp"
#include "gradopt/objectives.hpp"

namespace gradopt {

struct SigmaNiceSpec {
  double sigma = 0.0;
  Vec global_minimizer;
  std::vector<double> delta_ladder;  // descending, each half the previous
};

struct Testbed {
  std::string name;
  ObjectivePtr objective;
  SigmaNiceSpec spec;
  DecisionSet set;
};

std::vector<double> halving_ladder(double first, int levels);

// Quadratic plus cosine wobble centred on x*, curvature s = sigma + |A| w^2.
// Admissible: |A| w^2 <= kMaxWobbleRatio * sigma and 0 < w <= kMaxWobbleFreq. d = 1 lives on [-10, 10], d = 2 on the unit disc.
inline constexpr double kMaxWobbleRatio = 4.0;
inline constexpr double kMaxWobbleFreq = 50.0;
Testbed make_sigma_nice_test_function(double sigma, int d, double wobble_amp, double wobble_freq);

// Shipped testbeds, certified by verify_sigma_nice (see the golden reports in tests/).
Testbed testbed_1d();  // notched kink on [-10, 10], four local minima
Testbed testbed_2d();  // radial bowl on the unit disc
// Quadratic-cosine with the wobble far past the admissible range; fails centering.
Testbed wobble_counterexample_1d();
Testbed make_testbed(const std::string& name);

struct MinResult {
  Vec x;
  double value;
};

// Global minimum of g over the set (d <= 2): dense grid then repeated zoomed grids.
MinResult grid_minimize(const std::function<double(const Vec&)>& g, const DecisionSet& set,
                        int points_per_dim);
MinResult smoothed_minimum(const Objective& obj, const DecisionSet& set, double delta);
MinResult global_minimum(const Objective& obj, const DecisionSet& set);

// 1-d: local minima on the set, as - to + sign changes of f' on an n-point grid.
std::vector<double> local_minima_1d(const Objective& obj, const DecisionSet& set, int n = 100000);

struct LevelCheck {
  double delta = 0.0;
  Vec minimizer;
  double centering_gap = 0.0;  // distance to the previous level's minimizer
  bool centering_ok = true;
  double min_eigenvalue = 0.0;
  Vec witness;  // where the smallest eigenvalue was seen
  int hessian_points = 0;
  double roundoff = 0.0;  // finite-difference rounding allowance on the eigenvalue
  bool convexity_ok = true;
};

struct NiceReport {
  bool pass = true;
  double sigma = 0.0;
  std::vector<LevelCheck> levels;
  std::string failure;  // first failing condition, empty on pass
};

NiceReport verify_sigma_nice(const Objective& obj, const SigmaNiceSpec& spec,
                             const DecisionSet& set);

}  // namespace gradopt
