#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gradopt/suffix_sgd.hpp"

namespace gradopt {

enum class Feedback { Gradient, Value };

struct EpochPlan {
  int m = 0;
  double delta = 0.0;
  double eps = 0.0;           // sigma delta^2 / 32
  double base_steps = 0.0;    // unscaled formula value
  long long steps = 0;        // scaled, rounded up even
  double shrink_radius = 0.0; // 1.5 delta
  double p_tilde = 0.0;
};

struct EpochSchedule {
  Feedback feedback = Feedback::Gradient;
  int M = 0;
  double alpha0 = 0.0;
  double diameter = 0.0;
  double eps = 0.0, p = 0.0, L = 0.0, sigma = 0.0, C = 0.0, scale = 1.0;
  int d = 1;
  std::vector<EpochPlan> epochs;
};

EpochSchedule build_schedule(double eps, double p, const DecisionSet& set, double L, double sigma,
                             Feedback feedback, double C, int d, double constant_scale = 1.0);

long long total_rounds(const EpochSchedule& schedule);
// Closed-form query envelope from the convergence proofs (unscaled).
double rounds_envelope(const EpochSchedule& schedule);

struct EpochRecord {
  int m = 0;
  double delta = 0.0;
  long long steps = 0;
  Vec start;
  Vec end;
};

struct RunTrace {
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
  std::vector<EpochRecord> epochs;
  Vec final_point;
  long long total_rounds = 0;
};

struct QueryRecord {
  long long round;  // global, 1-based
  int epoch;
  double delta;
  const Vec& point;
  double norm;  // oracle output norm
};

using TraceSink = std::function<void(const QueryRecord&)>;

struct RunResult {
  Vec final_point;
  RunTrace trace;
  EpochSchedule schedule;
};

struct RunOptions {
  const TraceSink* sink = nullptr;
  const Vec* initial_point = nullptr;  // default: uniform draw from the set
  std::uint64_t seed = 0;              // recorded in the trace
};

RunResult gradopt_g(double eps, double p, const DecisionSet& set, const Objective& obj, double sigma,
                    Rng& rng, double constant_scale = 1.0, const RunOptions& opts = {});

RunResult gradopt_v(double eps, double p, const DecisionSet& set, const Objective& obj, double sigma,
                    double C, Rng& rng, double constant_scale = 1.0, const RunOptions& opts = {});

// Runs a prepared schedule; gradopt_g / gradopt_v are thin wrappers.
RunResult run_schedule(const EpochSchedule& schedule, const DecisionSet& set, const Objective& obj,
                       Rng& rng, const RunOptions& opts = {});

// One epoch over the whole set at a fixed delta, no shrinking.
EpochSchedule fixed_schedule(const DecisionSet& set, Feedback feedback, double sigma, double delta,
                             long long steps, double L, double C, int d);

// Single-epoch Suffix-SGD over the whole set at a fixed delta (0 allowed for gradients).
RunResult fixed_delta_sgd(const DecisionSet& set, const Objective& obj, Feedback feedback,
                          double sigma, double delta, long long steps, Rng& rng,
                          const RunOptions& opts = {});

}  // namespace gradopt
