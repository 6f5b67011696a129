#pragma once

#include <string>
#include <vector>

#include "gradopt/objectives.hpp"

namespace gradopt {

// Quadrature rule on the unit ball: E_u[g(u)] ~ sum_k w_k g(node_k), weights sum to 1.
struct BallRule {
  Eigen::MatrixXd nodes;  // d x n
  Eigen::VectorXd weights;
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Rule for d <= 3, resolved finely enough for features of the given width at radius delta.
const BallRule& ball_rule(int d, double delta, double feature_scale);

// f_delta(x) = E_{u~B}[f(x + delta u)]. Quadrature for d <= 3, seeded Monte-Carlo above.
double reference_smoothed_value(const Objective& obj, const Vec& x, double delta);
Vec reference_smoothed_gradient(const Objective& obj, const Vec& x, double delta);

struct McValue {
  double mean;
  double std_error;
};

struct McGradient {
  Vec mean;
  Vec std_error;
};

inline constexpr long kDefaultMcSamples = 200000;

McValue mc_smoothed_value(const Objective& obj, const Vec& x, double delta, long samples,
                          std::uint64_t seed);
McGradient mc_smoothed_gradient(const Objective& obj, const Vec& x, double delta, long samples,
                                std::uint64_t seed);

struct BiasReport {
  bool pass = true;
  double max_ratio = 0.0;  // max |f_delta - f| / (delta L)
  Vec worst;
  std::string message;
};

BiasReport check_bias_bound(const Objective& obj, double delta, const std::vector<Vec>& grid);

}  // namespace gradopt
