#include "gradopt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "gradopt/smoothing.hpp"

namespace gradopt {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Ctx {
  const std::string& source;
  int line;
  std::string key;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": field '" + key + "': " + msg);
  }
};

double to_double(const Ctx& c, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) c.fail("trailing characters in number '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    c.fail("expected a number, got '" + v + "'");
  }
}

long long to_int(const Ctx& c, const std::string& v) {
  try {
    size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) c.fail("expected an integer, got '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    c.fail("expected an integer, got '" + v + "'");
  }
}

Vec to_vec(const Ctx& c, std::string v) {
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream is(v);
  std::vector<double> xs;
  std::string tok;
  while (is >> tok) xs.push_back(to_double(c, tok));
  if (xs.empty()) c.fail("expected a vector");
  return Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

std::vector<std::uint64_t> to_seeds(const Ctx& c, std::string v) {
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream is(v);
  std::vector<std::uint64_t> out;
  std::string tok;
  while (is >> tok) {
    size_t dash = tok.find('-', 1);
    if (dash == std::string::npos) {
      long long s = to_int(c, tok);
      if (s < 0) c.fail("seeds must be non-negative");
      out.push_back(static_cast<std::uint64_t>(s));
    } else {
      long long a = to_int(c, tok.substr(0, dash)), b = to_int(c, tok.substr(dash + 1));
      if (a < 0 || b < a) c.fail("bad seed range '" + tok + "'");
      for (long long s = a; s <= b; ++s) out.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (out.empty()) c.fail("empty seed list");
  return out;
}

bool to_bool(const Ctx& c, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  c.fail("expected true or false, got '" + v + "'");
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

double smoothed(const Objective& obj, const Vec& x, double delta) {
  return delta == 0.0 ? obj.exact().value(x) : reference_smoothed_value(obj, x, delta);
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  cfg.source = source;
  std::string section, raw;
  std::map<std::string, std::string> setkv;
  int setline = 0;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line[0] == ';') continue;
    Ctx c{source, lineno, ""};
    if (line.front() == '[') {
      if (line.back() != ']') c.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"objective", "set", "noise", "algorithm", "run"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        c.fail("unknown section [" + section + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) c.fail("expected key = value");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    c.key = section.empty() ? key : section + "." + key;
    if (section.empty()) c.fail("key outside any section");
    if (val.empty()) c.fail("empty value");
    cfg.snapshot.emplace_back(c.key, val);

    if (section == "objective") {
      if (key == "name") cfg.objective = val;
      else if (key == "sigma") cfg.obj_sigma = to_double(c, val);
      else if (key == "d") cfg.obj_dim = static_cast<int>(to_int(c, val));
      else if (key == "wobble_amp") cfg.wobble_amp = to_double(c, val);
      else if (key == "wobble_freq") cfg.wobble_freq = to_double(c, val);
      else c.fail("unknown key");
    } else if (section == "set") {
      static const char* keys[] = {"shape", "lower", "upper", "center", "radius"};
      if (std::find(std::begin(keys), std::end(keys), key) == std::end(keys)) c.fail("unknown key");
      setkv[key] = val;
      setline = lineno;
    } else if (section == "noise") {
      if (key == "kind") {
        if (val == "none") cfg.noise = NoiseModel::Kind::None;
        else if (val == "gradient") cfg.noise = NoiseModel::Kind::UniformGradient;
        else if (val == "value") cfg.noise = NoiseModel::Kind::UniformValue;
        else c.fail("expected none, gradient or value");
      } else if (key == "kappa") {
        cfg.kappa = to_double(c, val);
        if (!(cfg.kappa >= 0) || !std::isfinite(cfg.kappa)) c.fail("kappa must be finite and >= 0");
      } else {
        c.fail("unknown key");
      }
    } else if (section == "algorithm") {
      if (key == "method") {
        if (val == "graduated") cfg.method = Method::Graduated;
        else if (val == "fixed") cfg.method = Method::Fixed;
        else c.fail("expected graduated or fixed");
      } else if (key == "feedback") {
        if (val == "gradient") cfg.feedback = Feedback::Gradient;
        else if (val == "value") cfg.feedback = Feedback::Value;
        else c.fail("expected gradient or value");
      } else if (key == "eps") {
        cfg.eps = to_double(c, val);
        if (!(cfg.eps > 0 && cfg.eps < 1)) c.fail("eps must lie in (0, 1)");
      } else if (key == "p") {
        cfg.p = to_double(c, val);
        if (!(cfg.p > 0 && cfg.p < std::exp(-1.0))) c.fail("p must lie in (0, 1/e)");
      } else if (key == "sigma") {
        cfg.sigma = to_double(c, val);
        if (!(*cfg.sigma > 0)) c.fail("sigma must be positive");
      } else if (key == "constant_scale") {
        cfg.constant_scale = to_double(c, val);
        if (!(cfg.constant_scale > 0)) c.fail("constant_scale must be positive");
      } else if (key == "delta") {
        cfg.delta = to_double(c, val);
        if (!(cfg.delta >= 0)) c.fail("delta must be >= 0");
      } else if (key == "steps") {
        cfg.steps = to_int(c, val);
        if (cfg.steps < 0) c.fail("steps must be >= 0");
      } else {
        c.fail("unknown key");
      }
    } else if (section == "run") {
      if (key == "seeds") {
        cfg.seeds = to_seeds(c, val);
      } else if (key == "trace_dir") {
        cfg.trace_dir = val;
      } else if (key == "trace_stride") {
        cfg.trace_stride = to_int(c, val);
        if (cfg.trace_stride < 1) c.fail("trace_stride must be >= 1");
      } else if (key == "report") {
        cfg.report = val;
      } else if (key == "proxies") {
        cfg.proxies = to_bool(c, val);
      } else {
        c.fail("unknown key");
      }
    }
  }

  if (!setkv.empty()) {
    Ctx c{source, setline, "set.shape"};
    auto get = [&](const char* k) -> std::string {
      auto it = setkv.find(k);
      if (it == setkv.end()) {
        c.key = std::string("set.") + k;
        c.fail("missing");
      }
      return it->second;
    };
    std::string shape = get("shape");
    try {
      if (shape == "box") {
        c.key = "set.lower";
        cfg.set = DecisionSet::box(to_vec(c, get("lower")), to_vec(c, get("upper")));
      } else if (shape == "ball") {
        c.key = "set.center";
        cfg.set = DecisionSet::ball(to_vec(c, get("center")), to_double(c, get("radius")));
      } else {
        c.fail("expected box or ball");
      }
    } catch (const InvalidArgument& e) {
      c.fail(e.what());
    }
  }
  if (cfg.method == Method::Graduated && cfg.delta != 0.0) {
    Ctx c{source, lineno, "algorithm.delta"};
    c.fail("delta only applies to method = fixed");
  }
  if (cfg.method == Method::Fixed && cfg.feedback == Feedback::Value && cfg.delta == 0.0) {
    Ctx c{source, lineno, "algorithm.delta"};
    c.fail("value feedback needs delta > 0");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

Testbed resolve_testbed(const RunConfig& cfg) {
  Testbed tb = [&] {
    if (cfg.objective == "quadcos")
      return make_sigma_nice_test_function(cfg.obj_sigma, cfg.obj_dim, cfg.wobble_amp, cfg.wobble_freq);
    if (cfg.objective == "quadratic")
      return make_sigma_nice_test_function(cfg.obj_sigma, cfg.obj_dim, 0.0, 1.0);
    return make_testbed(cfg.objective);
  }();
  if (cfg.set) {
    if (cfg.set->dim() != tb.objective->dim())
      throw ConfigError("set dimension " + std::to_string(cfg.set->dim()) +
                        " does not match objective dimension " +
                        std::to_string(tb.objective->dim()));
    tb.set = *cfg.set;
  }
  return tb;
}

namespace {

double effective_L(const RunConfig& cfg, const Objective& obj) {
  double L = obj.lipschitz();
  if (cfg.noise == NoiseModel::Kind::UniformGradient) L += cfg.kappa * std::sqrt(double(obj.dim()));
  return L;
}

double effective_C(const RunConfig& cfg, const Objective& obj) {
  double C = obj.value_bound();
  if (cfg.noise == NoiseModel::Kind::UniformValue) C += cfg.kappa;
  return C;
}

}  // namespace

EpochSchedule schedule_for(const RunConfig& cfg, const Testbed& tb) {
  const Objective& obj = *tb.objective;
  const double sigma = cfg.sigma.value_or(tb.spec.sigma);
  const double L = effective_L(cfg, obj), C = effective_C(cfg, obj);
  auto graduated = [&](double s) {
    return build_schedule(cfg.eps, cfg.p, tb.set, L, s, cfg.feedback,
                          cfg.feedback == Feedback::Value ? C : 0.0, obj.dim(), cfg.constant_scale);
  };
  if (cfg.method == Method::Graduated) return graduated(sigma);
  const long long steps = cfg.steps > 0 ? cfg.steps : total_rounds(graduated(tb.spec.sigma));
  EpochSchedule s = fixed_schedule(tb.set, cfg.feedback, sigma, cfg.delta,
                                   steps, L, C, obj.dim());
  s.eps = cfg.eps;
  s.p = cfg.p;
  s.scale = cfg.constant_scale;
  return s;
}

int worker_count() {
  if (const char* env = std::getenv("GRADOPT_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string point_hash(const Vec& x) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* b = reinterpret_cast<const unsigned char*>(x.data());
  for (size_t i = 0; i < sizeof(double) * static_cast<size_t>(x.size()); ++i) {
    h ^= b[i];
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

SeedOutcome run_seed(const RunConfig& cfg, const Testbed& tb, const EpochSchedule& sched,
                     const std::vector<double>& smoothed_min, double fstar, std::uint64_t seed) {
  SeedOutcome out;
  out.seed = seed;
  ObjectivePtr obj = tb.objective;
  if (cfg.noise != NoiseModel::Kind::None) obj = make_noisy(tb.objective, {cfg.noise, cfg.kappa, seed});

  std::vector<char> buf(1 << 16);  // must outlive trace
  std::ofstream trace;
  TraceSink sink;
  if (!cfg.trace_dir.empty()) {
    std::filesystem::create_directories(cfg.trace_dir);
    trace.rdbuf()->pubsetbuf(buf.data(), static_cast<std::streamsize>(buf.size()));
    trace.open(cfg.trace_dir + "/trace_seed" + std::to_string(seed) + ".csv");
    if (!trace) throw ConfigError("cannot open trace file in '" + cfg.trace_dir + "'");
    trace << "# gradopt trace schema " << kTraceSchemaVersion << "\n";
    trace << "# library " << kLibraryVersion << "\n";
    trace << "# seed " << seed << "\n";
    for (const auto& [k, v] : cfg.snapshot) trace << "# config " << k << " = " << v << "\n";
    trace << "round,epoch,delta,point_hash,oracle_norm\n";
    const long long stride = cfg.trace_stride;
    sink = [&trace, stride](const QueryRecord& q) {
      if ((q.round - 1) % stride != 0) return;
      char line[160];
      int n = std::snprintf(line, sizeof line, "%lld,%d,%.17g,%s,%.17g\n", q.round, q.epoch, q.delta,
                            point_hash(q.point).c_str(), q.norm);
      trace.write(line, n);
    };
  }

  try {
    Rng rng(seed);
    RunOptions opts;
    opts.sink = sink ? &sink : nullptr;
    opts.seed = seed;
    RunResult r = run_schedule(sched, tb.set, *obj, rng, opts);
    const Objective& f = tb.objective->exact();
    out.initial_point = r.trace.epochs.front().start;
    out.final_point = r.final_point;
    out.final_value = f.value(r.final_point);
    out.excess = out.final_value - fstar;
    out.success = out.excess <= cfg.eps;
    out.total_rounds = r.trace.total_rounds;
    for (size_t i = 0; i < r.trace.epochs.size(); ++i) {
      const EpochRecord& e = r.trace.epochs[i];
      EpochOutcome eo;
      eo.m = e.m;
      eo.delta = e.delta;
      eo.steps = e.steps;
      eo.start = e.start;
      eo.end = e.end;
      eo.proxy_bound = sched.sigma * (e.delta / 2) * (e.delta / 2) / 8.0;
      if (i < smoothed_min.size()) {
        eo.smoothed_excess = smoothed(*tb.objective, e.end, e.delta) - smoothed_min[i];
        eo.proxy_ok = eo.smoothed_excess <= eo.proxy_bound;
      }
      out.epochs.push_back(eo);
    }
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  return out;
}

}  // namespace

Report run_experiment(const RunConfig& cfg) {
  Report rep;
  rep.config = cfg;
  Testbed tb = resolve_testbed(cfg);
  rep.schedule = schedule_for(cfg, tb);
  rep.global_min = global_minimum(*tb.objective, tb.set);

  std::vector<double> smin;
  if (cfg.proxies && tb.objective->dim() <= 2)
    for (const EpochPlan& e : rep.schedule.epochs)
      smin.push_back(e.delta == 0.0 ? rep.global_min.value
                                    : smoothed_minimum(*tb.objective, tb.set, e.delta).value);

  rep.seeds.resize(cfg.seeds.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < cfg.seeds.size();)
      rep.seeds[i] = run_seed(cfg, tb, rep.schedule, smin, rep.global_min.value, cfg.seeds[i]);
  };
  const int nw = std::min<int>(worker_count(), static_cast<int>(cfg.seeds.size()));
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  double sum = 0.0;
  int ok = 0;
  for (const auto& s : rep.seeds) {
    if (!s.error.empty()) rep.failed = true;
    if (s.success) ++rep.successes;
    if (s.error.empty()) {
      sum += s.excess;
      ++ok;
    }
  }
  const double n = static_cast<double>(rep.seeds.size()), z = 1.96;
  rep.success_rate = rep.successes / n;
  rep.mean_excess = ok ? sum / ok : NAN;
  const double ph = rep.success_rate, den = 1.0 + z * z / n;
  const double centre = (ph + z * z / (2 * n)) / den;
  const double half = z * std::sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den;
  rep.ci_low = std::max(0.0, centre - half);
  rep.ci_high = std::min(1.0, centre + half);

  if (!cfg.report.empty()) {
    std::filesystem::path p(cfg.report);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream o(cfg.report);
    if (!o) throw ConfigError("cannot write report '" + cfg.report + "'");
    o << report_json(rep) << "\n";
  }
  return rep;
}

namespace {

json schedule_obj(const EpochSchedule& s) {
  json j;
  j["feedback"] = s.feedback == Feedback::Gradient ? "gradient" : "value";
  j["M"] = s.M;
  j["alpha0"] = s.alpha0;
  j["diameter"] = s.diameter;
  j["eps"] = s.eps;
  j["p"] = s.p;
  j["L"] = s.L;
  j["sigma"] = s.sigma;
  j["C"] = s.C;
  j["d"] = s.d;
  j["constant_scale"] = s.scale;
  j["total_rounds"] = total_rounds(s);
  if (s.alpha0 > 0) {
    j["envelope_unscaled"] = rounds_envelope(s);
    j["envelope_scaled"] = rounds_envelope(s) * s.scale;
  }
  json ep = json::array();
  for (const auto& e : s.epochs) {
    json r;
    r["m"] = e.m;
    r["delta"] = e.delta;
    r["eps_m"] = e.eps;
    r["steps"] = e.steps;
    r["steps_unscaled"] = e.base_steps;
    r["shrink_radius"] = std::isinf(e.shrink_radius) ? json(nullptr) : json(e.shrink_radius);
    r["p_tilde"] = e.p_tilde;
    ep.push_back(r);
  }
  j["epochs"] = ep;
  return j;
}

json config_obj(const RunConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : c.snapshot) j[k] = v;
  return j;
}

json report_obj(const Report& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["library_version"] = kLibraryVersion;
  j["config"] = config_obj(r.config);
  j["schedule"] = schedule_obj(r.schedule);
  j["global_min"] = {{"x", vec_json(r.global_min.x)}, {"value", r.global_min.value}};
  json seeds = json::array();
  for (const auto& s : r.seeds) {
    json o;
    o["seed"] = s.seed;
    if (!s.error.empty()) {
      o["error"] = s.error;
      seeds.push_back(o);
      continue;
    }
    o["initial_point"] = vec_json(s.initial_point);
    o["final_point"] = vec_json(s.final_point);
    o["final_value"] = s.final_value;
    o["excess"] = s.excess;
    o["success"] = s.success;
    o["total_rounds"] = s.total_rounds;
    json ep = json::array();
    for (const auto& e : s.epochs)
      ep.push_back({{"m", e.m},
                    {"delta", e.delta},
                    {"steps", e.steps},
                    {"end", vec_json(e.end)},
                    {"smoothed_excess", e.smoothed_excess},
                    {"proxy_bound", e.proxy_bound},
                    {"proxy_ok", e.proxy_ok}});
    o["epochs"] = ep;
    seeds.push_back(o);
  }
  j["seeds"] = seeds;
  j["aggregate"] = {{"runs", r.seeds.size()},     {"successes", r.successes},
                    {"success_rate", r.success_rate}, {"ci95", {r.ci_low, r.ci_high}},
                    {"mean_excess", r.mean_excess},   {"failed", r.failed}};
  return j;
}

}  // namespace

std::string report_json(const Report& r) { return report_obj(r).dump(2); }

std::string schedule_json(const EpochSchedule& s) { return schedule_obj(s).dump(2); }

std::string nice_report_json(const NiceReport& r, const std::string& name) {
  json j;
  j["testbed"] = name;
  j["pass"] = r.pass;
  j["sigma"] = r.sigma;
  j["failure"] = r.failure;
  json lv = json::array();
  for (const auto& l : r.levels)
    lv.push_back({{"delta", l.delta},
                  {"minimizer", vec_json(l.minimizer)},
                  {"centering_gap", l.centering_gap},
                  {"centering_ok", l.centering_ok},
                  {"min_eigenvalue", l.min_eigenvalue},
                  {"witness", vec_json(l.witness)},
                  {"hessian_points", l.hessian_points},
                  {"fd_roundoff", l.roundoff},
                  {"convexity_ok", l.convexity_ok}});
  j["levels"] = lv;
  return j.dump(2);
}

double binomial_cdf_half(int k, int n) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  double s = 0.0;
  for (int i = 0; i <= k; ++i)
    s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  return std::min(1.0, s);
}

Comparison compare_experiments(const RunConfig& a, const RunConfig& b) {
  auto shared = [](const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> v;
    for (const auto& kv : c.snapshot)
      if (kv.first.rfind("objective.", 0) == 0 || kv.first.rfind("set.", 0) == 0) v.push_back(kv);
    std::sort(v.begin(), v.end());
    return v;
  };
  if (a.objective != b.objective || shared(a) != shared(b))
    throw InvalidArgument("compare: configurations use different objectives or sets");
  if (a.seeds != b.seeds) throw InvalidArgument("compare: configurations use different seed lists");

  Comparison c;
  c.a = run_experiment(a);
  c.b = run_experiment(b);
  double sa = 0.0, sb = 0.0;
  for (size_t i = 0; i < a.seeds.size(); ++i) {
    ComparisonRow row{a.seeds[i], c.a.seeds[i].excess, c.b.seeds[i].excess};
    sa += row.excess_a;
    sb += row.excess_b;
    if (row.excess_a < row.excess_b) ++c.a_better;
    else if (row.excess_a > row.excess_b) ++c.b_better;
    else ++c.ties;
    c.rows.push_back(row);
  }
  const double n = static_cast<double>(c.rows.size());
  c.mean_a = sa / n;
  c.mean_b = sb / n;
  const int m = c.a_better + c.b_better;
  c.sign_test_p = std::min(1.0, 2.0 * binomial_cdf_half(std::min(c.a_better, c.b_better), m));
  c.sign_test_p_a = binomial_cdf_half(c.b_better, m);
  return c;
}

std::string comparison_json(const Comparison& c) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["library_version"] = kLibraryVersion;
  j["config_a"] = config_obj(c.a.config);
  j["config_b"] = config_obj(c.b.config);
  json rows = json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"seed", r.seed}, {"excess_a", r.excess_a}, {"excess_b", r.excess_b},
                    {"difference", r.excess_a - r.excess_b}});
  j["rows"] = rows;
  j["mean_excess_a"] = c.mean_a;
  j["mean_excess_b"] = c.mean_b;
  j["success_rate_a"] = c.a.success_rate;
  j["success_rate_b"] = c.b.success_rate;
  j["a_better"] = c.a_better;
  j["b_better"] = c.b_better;
  j["ties"] = c.ties;
  j["sign_test_p_two_sided"] = c.sign_test_p;
  j["sign_test_p_a_lower"] = c.sign_test_p_a;
  return j.dump(2);
}

}  // namespace gradopt
