#include "gradopt/oracles.hpp"

#include <cmath>

namespace gradopt {

namespace {

void check(Flavor flavor, const Objective& obj, double delta) {
  if (!std::isfinite(delta) || delta < 0.0) throw InvalidArgument("oracle: delta must be non-negative");
  if (flavor == Flavor::ValueBased && delta == 0.0)
    throw InvalidArgument("value oracle: delta must be strictly positive");
  if (delta > obj.domain_margin())
    throw InvalidArgument("oracle: delta " + std::to_string(delta) + " exceeds domain margin " +
                          std::to_string(obj.domain_margin()));
}

}  // namespace

double declared_bound(Flavor flavor, const Objective& obj, double delta) {
  if (flavor == Flavor::GradientBased) return obj.lipschitz();
  return obj.dim() * obj.value_bound() / delta;
}

SmoothedOracle::SmoothedOracle(Flavor flavor, const Objective& obj, double delta, Rng& rng)
    : flavor_(flavor), obj_(obj), delta_(delta), rng_(rng), u_(obj.dim()), y_(obj.dim()) {
  check(flavor, obj, delta);
  G_ = gradopt::declared_bound(flavor, obj, delta);
}

void SmoothedOracle::query(const Vec& x, Vec& out) {
  if (flavor_ == Flavor::GradientBased) {
    sample_unit_into(UnitKind::Ball, rng_, u_);
    y_ = x + delta_ * u_;
    obj_.gradient(y_, out);
  } else {
    sample_unit_into(UnitKind::Sphere, rng_, u_);
    y_ = x + delta_ * u_;
    out = (obj_.dim() * obj_.value(y_) / delta_) * u_;
  }
}

Vec SmoothedOracle::query(const Vec& x) {
  Vec g(obj_.dim());
  query(x, g);
  return g;
}

SmoothedOracle make_oracle(Flavor flavor, const Objective& obj, double delta, Rng& rng) {
  return SmoothedOracle(flavor, obj, delta, rng);
}

Vec sgo_g(const Objective& obj, const Vec& x, double delta, Rng& rng) {
  return SmoothedOracle(Flavor::GradientBased, obj, delta, rng).query(x);
}

Vec sgo_v(const Objective& obj, const Vec& x, double delta, Rng& rng) {
  return SmoothedOracle(Flavor::ValueBased, obj, delta, rng).query(x);
}

Vec averaged_query(SmoothedOracle& oracle, const Vec& x, int batch) {
  require(batch >= 1, "averaged_query: batch must be positive");
  Vec s = Vec::Zero(x.size()), g(x.size());
  for (int i = 0; i < batch; ++i) {
    oracle.query(x, g);
    s += g;
  }
  return s / batch;
}

}  // namespace gradopt
