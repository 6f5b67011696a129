#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradopt/gradopt.hpp"
#include "gradopt/testbed.hpp"

namespace gradopt {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kTraceSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

enum class Method { Graduated, Fixed };

struct RunConfig {
  std::string source;  // file name, for messages

  // [objective]
  std::string objective = "testbed1d";
  double obj_sigma = 1.0;
  int obj_dim = 1;
  double wobble_amp = 0.0;
  double wobble_freq = 1.0;

  // [set]
  std::optional<DecisionSet> set;

  // [noise]
  NoiseModel::Kind noise = NoiseModel::Kind::None;
  double kappa = 0.0;

  // [algorithm]
  Method method = Method::Graduated;
  Feedback feedback = Feedback::Gradient;
  double eps = 0.1;
  double p = 0.1;
  std::optional<double> sigma;  // default: the testbed's certified sigma
  double constant_scale = 1.0;
  double delta = 0.0;    // fixed method only
  long long steps = 0;   // fixed method only; 0 means the graduated budget at the certified sigma

  // [run]
  std::vector<std::uint64_t> seeds{1};
  std::string trace_dir;
  long long trace_stride = 1;
  std::string report;
  bool proxies = true;

  std::vector<std::pair<std::string, std::string>> snapshot;  // "section.key" -> raw value
};

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// The testbed a config refers to, with the [set] override applied.
Testbed resolve_testbed(const RunConfig& cfg);
EpochSchedule schedule_for(const RunConfig& cfg, const Testbed& tb);

struct EpochOutcome {
  int m = 0;
  double delta = 0.0;
  long long steps = 0;
  Vec start, end;
  double smoothed_excess = 0.0;  // f_delta(end) - min_K f_delta
  double proxy_bound = 0.0;      // sigma delta_{m+1}^2 / 8
  bool proxy_ok = true;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  Vec initial_point, final_point;
  double final_value = 0.0;
  double excess = 0.0;
  bool success = false;
  long long total_rounds = 0;
  std::vector<EpochOutcome> epochs;
  std::string error;  // non-empty if the run failed
};

struct Report {
  RunConfig config;
  EpochSchedule schedule;
  MinResult global_min;
  std::vector<SeedOutcome> seeds;
  int successes = 0;
  double success_rate = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // Wilson 95%
  double mean_excess = 0.0;
  bool failed = false;
};

// Worker-pool size: GRADOPT_WORKERS if set, else hardware concurrency.
int worker_count();

Report run_experiment(const RunConfig& cfg);
std::string report_json(const Report& r);
std::string schedule_json(const EpochSchedule& s);
std::string nice_report_json(const NiceReport& r, const std::string& name);

struct ComparisonRow {
  std::uint64_t seed;
  double excess_a, excess_b;
};

struct Comparison {
  Report a, b;
  std::vector<ComparisonRow> rows;
  double mean_a = 0.0, mean_b = 0.0;
  int a_better = 0, b_better = 0, ties = 0;
  double sign_test_p = 1.0;       // two-sided
  double sign_test_p_a = 1.0;     // one-sided, A lower
};

Comparison compare_experiments(const RunConfig& a, const RunConfig& b);
std::string comparison_json(const Comparison& c);

// Exact binomial sign test; returns P(X <= k) for X ~ Bin(n, 1/2).
double binomial_cdf_half(int k, int n);

std::string point_hash(const Vec& x);

}  // namespace gradopt
