#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gradopt/common.hpp"

namespace gradopt {

// Black-box objective with declared constants. L and C are promised on
// K + domain_margin * B for the decision set the objective ships with.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual void gradient(const Vec& x, Vec& g) const = 0;
  virtual double lipschitz() const = 0;
  virtual double value_bound() const = 0;
  virtual double domain_margin() const = 0;
  // Narrowest feature of the landscape; the reference smoother sizes its rule from it.
  virtual double feature_scale() const { return 1.0; }
  // Noise-free view (identity unless wrapped).
  virtual const Objective& exact() const { return *this; }

  double eval_value(const Vec& x) const { return value(x); }
  Vec eval_gradient(const Vec& x) const {
    Vec g(dim());
    gradient(x, g);
    return g;
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

class FunctionObjective : public Objective {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;

  FunctionObjective(int d, ValueFn f, GradFn g, double L, double C, double margin,
                    double feature = 1.0)
      : d_(d), f_(std::move(f)), g_(std::move(g)), L_(L), C_(C), margin_(margin),
        feature_(feature) {}

  int dim() const override { return d_; }
  double value(const Vec& x) const override { return f_(x); }
  void gradient(const Vec& x, Vec& g) const override { g = g_(x); }
  double lipschitz() const override { return L_; }
  double value_bound() const override { return C_; }
  double domain_margin() const override { return margin_; }
  double feature_scale() const override { return feature_; }

 private:
  int d_;
  ValueFn f_;
  GradFn g_;
  double L_, C_, margin_, feature_;
};

// (s/2)|x - x*|^2 + A * sum_i cos(w (x_i - x*_i)) - offset.
// Constants are declared over the ball of radius region_radius about region_center.
struct QuadCosParams {
  double sigma_prime = 1.0;
  double amp = 0.0;
  double freq = 1.0;
  Vec xstar;
  Vec region_center;
  double region_radius = 1.0;
  double margin = 1.0;
  double offset = 0.0;
};

class QuadraticCosine : public Objective {
 public:
  explicit QuadraticCosine(QuadCosParams p);

  int dim() const override { return static_cast<int>(p_.xstar.size()); }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& g) const override;
  double lipschitz() const override { return L_; }
  double value_bound() const override { return C_; }
  double domain_margin() const override { return p_.margin; }
  double feature_scale() const override;
  const QuadCosParams& params() const { return p_; }

 private:
  QuadCosParams p_;
  double L_, C_;
};

// 1-d asymmetric smoothed kink with narrow negative-slope notches on its steep side:
//   f'(x) = scale * [c y + (gR+gL)/2 tanh(y/w) + (gR-gL)/2 - sum_j h_j exp(-((x-c_j)/s_j)^2)]
// with y = x - center. Each notch height h_j is the base slope at c_j plus overshoot,
// so every notch carves one shallow local minimum.
struct Notch {
  double distance;  // c_j - center
  double width;
};

struct NotchedKinkParams {
  double center = -6.0;
  double curvature = 0.02;
  double left_slope = 0.3;
  double right_slope = 1.2;
  double kink_width = 0.05;
  double overshoot = 0.05;
  double scale = 0.022;
  std::vector<Notch> notches{{9.3, 0.2}, {4.65, 0.1}, {2.3, 0.05}};
  double region_lo = -20.0;
  double region_hi = 20.0;
  double margin = 10.0;
};

class NotchedKink : public Objective {
 public:
  explicit NotchedKink(NotchedKinkParams p);

  int dim() const override { return 1; }
  double value(const Vec& x) const override { return value1(x[0]); }
  void gradient(const Vec& x, Vec& g) const override { g[0] = slope1(x[0]); }
  double lipschitz() const override { return L_; }
  double value_bound() const override { return C_; }
  double domain_margin() const override { return p_.margin; }
  double feature_scale() const override;

  double value1(double x) const;
  double slope1(double x) const;
  const NotchedKinkParams& params() const { return p_; }

 private:
  double raw_value(double x) const;
  double base_slope(double y) const;
  NotchedKinkParams p_;
  std::vector<double> centers_, heights_;
  double offset_ = 0.0, L_ = 0.0, C_ = 0.0;
};

// 2-d radial bowl: quadratic core of curvature s up to radius R, linear growth past it,
// plus a small cosine wobble. Constants declared on the ball of radius region_radius at 0.
struct RadialBowlParams {
  double sigma_prime = 0.7;
  double core_radius = 1.1;
  double wobble_ratio = 0.1;  // A w^2 / s
  double freq = 4.0 * 3.14159265358979323846;
  Vec xstar = (Vec(2) << 0.05, -0.03).finished();
  double region_radius = 2.0;
  double margin = 1.0;
};

class RadialBowl : public Objective {
 public:
  explicit RadialBowl(RadialBowlParams p);

  int dim() const override { return static_cast<int>(p_.xstar.size()); }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& g) const override;
  double lipschitz() const override { return L_; }
  double value_bound() const override { return C_; }
  double domain_margin() const override { return p_.margin; }
  double feature_scale() const override;
  const RadialBowlParams& params() const { return p_; }

 private:
  double profile(double r) const;
  RadialBowlParams p_;
  double amp_, offset_, L_, C_;
};

struct NoiseModel {
  enum class Kind { None, UniformGradient, UniformValue };
  Kind kind = Kind::None;
  double kappa = 0.0;
  std::uint64_t seed = 0;
};

// Adds componentwise uniform [-kappa, kappa] noise to gradient or value queries.
// Owns its noise stream: one instance per worker.
class NoisyObjective : public Objective {
 public:
  NoisyObjective(ObjectivePtr base, NoiseModel noise);

  int dim() const override { return base_->dim(); }
  double value(const Vec& x) const override;
  void gradient(const Vec& x, Vec& g) const override;
  double lipschitz() const override;
  double value_bound() const override;
  double domain_margin() const override { return base_->domain_margin(); }
  double feature_scale() const override { return base_->feature_scale(); }
  const Objective& exact() const override { return base_->exact(); }
  const NoiseModel& noise() const { return noise_; }

 private:
  double draw() const { return noise_.kappa * (2.0 * rng_.uniform() - 1.0); }
  ObjectivePtr base_;
  NoiseModel noise_;
  mutable Rng rng_;
};

std::shared_ptr<Objective> make_noisy(ObjectivePtr obj, NoiseModel noise);

}  // namespace gradopt
