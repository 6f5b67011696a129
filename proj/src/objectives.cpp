#include "gradopt/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gradopt {

QuadraticCosine::QuadraticCosine(QuadCosParams p) : p_(std::move(p)) {
  require(p_.xstar.size() > 0, "quadratic-cosine: empty minimizer");
  require(p_.sigma_prime > 0, "quadratic-cosine: curvature must be positive");
  require(p_.freq > 0, "quadratic-cosine: frequency must be positive");
  if (p_.region_center.size() == 0) p_.region_center = Vec::Zero(p_.xstar.size());
  require(p_.region_center.size() == p_.xstar.size(), "quadratic-cosine: dimension mismatch");
  const double d = static_cast<double>(p_.xstar.size());
  const double rmax = (p_.region_center - p_.xstar).norm() + p_.region_radius;
  const double a = std::abs(p_.amp);
  L_ = p_.sigma_prime * rmax + a * p_.freq * std::sqrt(d);
  const double lo = -a * d - p_.offset;
  const double hi = 0.5 * p_.sigma_prime * rmax * rmax + a * d - p_.offset;
  C_ = std::max(std::abs(lo), std::abs(hi));
}

double QuadraticCosine::value(const Vec& x) const {
  double q = 0.0, w = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double y = x[i] - p_.xstar[i];
    q += y * y;
    w += std::cos(p_.freq * y);
  }
  return 0.5 * p_.sigma_prime * q + p_.amp * w - p_.offset;
}

void QuadraticCosine::gradient(const Vec& x, Vec& g) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double y = x[i] - p_.xstar[i];
    g[i] = p_.sigma_prime * y - p_.amp * p_.freq * std::sin(p_.freq * y);
  }
}

double QuadraticCosine::feature_scale() const {
  if (p_.amp == 0.0) return 1e30;
  return 2.0 * std::numbers::pi / p_.freq / 5.0;
}

namespace {
double logcosh(double z) {
  double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}
}  // namespace

NotchedKink::NotchedKink(NotchedKinkParams p) : p_(std::move(p)) {
  require(p_.kink_width > 0 && p_.scale > 0, "notched kink: widths and scale must be positive");
  require(p_.region_lo < p_.region_hi, "notched kink: empty region");
  for (const auto& n : p_.notches) {
    require(n.width > 0, "notched kink: notch width must be positive");
    centers_.push_back(p_.center + n.distance);
    heights_.push_back(base_slope(n.distance) + p_.overshoot);
  }
  // Declared constants come from a dense scan of the region, padded by 1%.
  constexpr int kScan = 400000;
  double gmax = 0.0, vlo = INFINITY, vhi = -INFINITY;
  for (int i = 0; i <= kScan; ++i) {
    double x = p_.region_lo + (p_.region_hi - p_.region_lo) * i / kScan;
    gmax = std::max(gmax, std::abs(slope1(x)));
    double v = raw_value(x);
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  offset_ = 0.5 * (vlo + vhi);
  L_ = 1.01 * gmax;
  C_ = 1.01 * 0.5 * (vhi - vlo);
}

double NotchedKink::base_slope(double y) const {
  return p_.curvature * y + 0.5 * (p_.right_slope + p_.left_slope) * std::tanh(y / p_.kink_width) +
         0.5 * (p_.right_slope - p_.left_slope);
}

double NotchedKink::slope1(double x) const {
  double v = base_slope(x - p_.center);
  for (size_t j = 0; j < centers_.size(); ++j) {
    double u = (x - centers_[j]) / p_.notches[j].width;
    v -= heights_[j] * std::exp(-u * u);
  }
  return p_.scale * v;
}

double NotchedKink::raw_value(double x) const {
  const double y = x - p_.center, w = p_.kink_width;
  double v = 0.5 * p_.curvature * y * y +
             0.5 * (p_.right_slope + p_.left_slope) * w * logcosh(y / w) +
             0.5 * (p_.right_slope - p_.left_slope) * y;
  for (size_t j = 0; j < centers_.size(); ++j) {
    const double s = p_.notches[j].width;
    v -= heights_[j] * s * 0.5 * std::sqrt(std::numbers::pi) * std::erf((x - centers_[j]) / s);
  }
  return p_.scale * v;
}

double NotchedKink::value1(double x) const { return raw_value(x) - offset_; }

double NotchedKink::feature_scale() const {
  double s = p_.kink_width;
  for (const auto& n : p_.notches) s = std::min(s, n.width);
  return s;
}

RadialBowl::RadialBowl(RadialBowlParams p) : p_(std::move(p)) {
  require(p_.sigma_prime > 0 && p_.core_radius > 0 && p_.freq > 0,
          "radial bowl: parameters must be positive");
  const double d = static_cast<double>(p_.xstar.size());
  amp_ = p_.wobble_ratio * p_.sigma_prime / (p_.freq * p_.freq);
  const double rmax = p_.xstar.norm() + p_.region_radius;
  L_ = p_.sigma_prime * std::min(p_.core_radius, rmax) + std::abs(amp_) * p_.freq * std::sqrt(d);
  offset_ = 0.5 * profile(rmax);
  C_ = 0.5 * profile(rmax) + std::abs(amp_) * d;
}

double RadialBowl::profile(double r) const {
  const double R = p_.core_radius;
  if (r <= R) return 0.5 * p_.sigma_prime * r * r;
  return p_.sigma_prime * R * (r - 0.5 * R);
}

double RadialBowl::value(const Vec& x) const {
  double r2 = 0.0, w = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double y = x[i] - p_.xstar[i];
    r2 += y * y;
    w += std::cos(p_.freq * y);
  }
  return profile(std::sqrt(r2)) + amp_ * w - offset_;
}

void RadialBowl::gradient(const Vec& x, Vec& g) const {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double y = x[i] - p_.xstar[i];
    r2 += y * y;
  }
  const double r = std::sqrt(r2), R = p_.core_radius;
  const double radial = r <= R ? p_.sigma_prime : p_.sigma_prime * R / r;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double y = x[i] - p_.xstar[i];
    g[i] = radial * y - amp_ * p_.freq * std::sin(p_.freq * y);
  }
}

double RadialBowl::feature_scale() const { return 2.0 * std::numbers::pi / p_.freq / 5.0; }

NoisyObjective::NoisyObjective(ObjectivePtr base, NoiseModel noise)
    : base_(std::move(base)), noise_(noise), rng_(noise.seed, 0x6e6f697365ULL) {
  require(base_ != nullptr, "make_noisy: null objective");
  require(std::isfinite(noise_.kappa) && noise_.kappa >= 0, "make_noisy: kappa must be finite");
}

double NoisyObjective::value(const Vec& x) const {
  double v = base_->value(x);
  if (noise_.kind == NoiseModel::Kind::UniformValue && noise_.kappa > 0) v += draw();
  return v;
}

void NoisyObjective::gradient(const Vec& x, Vec& g) const {
  base_->gradient(x, g);
  if (noise_.kind == NoiseModel::Kind::UniformGradient && noise_.kappa > 0)
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += draw();
}

double NoisyObjective::lipschitz() const {
  double L = base_->lipschitz();
  if (noise_.kind == NoiseModel::Kind::UniformGradient)
    L += noise_.kappa * std::sqrt(static_cast<double>(dim()));
  return L;
}

double NoisyObjective::value_bound() const {
  double C = base_->value_bound();
  if (noise_.kind == NoiseModel::Kind::UniformValue) C += noise_.kappa;
  return C;
}

std::shared_ptr<Objective> make_noisy(ObjectivePtr obj, NoiseModel noise) {
  return std::make_shared<NoisyObjective>(std::move(obj), noise);
}

}  // namespace gradopt
