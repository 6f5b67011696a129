#pragma once

#include "gradopt/geometry.hpp"
#include "gradopt/objectives.hpp"

namespace gradopt {

enum class Flavor { GradientBased, ValueBased };

// One draw of grad f(x + delta u), u ~ Ball.
Vec sgo_g(const Objective& obj, const Vec& x, double delta, Rng& rng);
// One draw of (d / delta) f(x + delta v) v, v ~ Sphere.
Vec sgo_v(const Objective& obj, const Vec& x, double delta, Rng& rng);

// G = L for gradient draws, d C / delta for value draws. Noisy objectives already
// report their inflated L + kappa sqrt(d) or C + kappa.
double declared_bound(Flavor flavor, const Objective& obj, double delta);

class SmoothedOracle {
 public:
  SmoothedOracle(Flavor flavor, const Objective& obj, double delta, Rng& rng);

  void query(const Vec& x, Vec& out);
  Vec query(const Vec& x);

  Flavor flavor() const { return flavor_; }
  double delta() const { return delta_; }
  double declared_bound() const { return G_; }
  const Objective& objective() const { return obj_; }

 private:
  Flavor flavor_;
  const Objective& obj_;
  double delta_, G_;
  Rng& rng_;
  Vec u_, y_;
};

SmoothedOracle make_oracle(Flavor flavor, const Objective& obj, double delta, Rng& rng);

// Mean of `batch` consecutive draws. Each draw still counts as one query.
Vec averaged_query(SmoothedOracle& oracle, const Vec& x, int batch);

}  // namespace gradopt
