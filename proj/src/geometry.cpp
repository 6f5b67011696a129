#include "gradopt/geometry.hpp"

#include <cmath>
#include <sstream>

namespace gradopt {

namespace {

void project_ball(const Ball& b, Vec& x) {
  double n = (x - b.center).norm();
  if (n > b.radius) x = b.center + (x - b.center) * (b.radius / n);
}

void project_box(const Box& b, Vec& x) { x = x.cwiseMax(b.lower).cwiseMin(b.upper); }

bool in_ball(const Ball& b, const Vec& x, double tol) {
  return (x - b.center).norm() <= b.radius + tol;
}

void check_dim(const DecisionSet& set, const Vec& x) {
  if (x.size() != set.dim())
    throw InvalidArgument("dimension mismatch: set has d=" + std::to_string(set.dim()) +
                          ", point has " + std::to_string(x.size()));
}

void dykstra(const Intersection& s, Vec& x) {
  Vec y = x;
  project_ball(s.ball, y);
  if (s.base->contains(y, 0.0)) {
    x = y;
    return;
  }
  Vec z = x;
  project_inplace(*s.base, z);
  if (in_ball(s.ball, z, 0.0)) {
    x = z;
    return;
  }

  Vec p = Vec::Zero(x.size()), q = Vec::Zero(x.size());
  Vec cur = x, a(x.size()), b(x.size());
  double residual = 0.0;
  for (int k = 0; k < kDykstraMaxIter; ++k) {
    a = cur + p;
    project_ball(s.ball, a);
    p = cur + p - a;
    b = a + q;
    project_inplace(*s.base, b);
    q = a + q - b;
    double step = (b - cur).norm();
    double gap = (a - b).norm();
    cur = b;
    residual = std::max(step, gap);
    if (step <= 1e-3 * kProjectionTol && gap <= kProjectionTol) {
      x = cur;
      return;
    }
  }
  throw NumericalFailure("Dykstra projection did not converge", residual);
}

}  // namespace

DecisionSet DecisionSet::ball(Vec center, double radius) {
  require(center.size() > 0, "ball: empty center");
  require(radius > 0 && std::isfinite(radius), "ball: radius must be positive");
  int d = static_cast<int>(center.size());
  return DecisionSet(Ball{std::move(center), radius}, d);
}

DecisionSet DecisionSet::box(Vec lower, Vec upper) {
  require(lower.size() > 0 && lower.size() == upper.size(), "box: bound sizes differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    require(lower[i] < upper[i], "box: lower[i] must be below upper[i]");
  int d = static_cast<int>(lower.size());
  return DecisionSet(Box{std::move(lower), std::move(upper)}, d);
}

DecisionSet DecisionSet::intersection(Ball ball, const DecisionSet& base) {
  require(ball.center.size() == base.dim(), "intersection: dimension mismatch");
  require(ball.radius > 0, "intersection: radius must be positive");
  int d = base.dim();
  return DecisionSet(Intersection{std::move(ball), std::make_shared<const DecisionSet>(base)}, d);
}

bool DecisionSet::contains(const Vec& x, double tol) const {
  if (x.size() != dim_) return false;
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return in_ball(s, x, tol);
        } else if constexpr (std::is_same_v<T, Box>) {
          return ((x - s.lower).array() >= -tol).all() && ((s.upper - x).array() >= -tol).all();
        } else {
          return in_ball(s.ball, x, tol) && s.base->contains(x, tol);
        }
      },
      shape_);
}

std::string DecisionSet::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto vec = [&](const Vec& v) {
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ')';
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          os << "ball";
          vec(s.center);
          os << 'r' << s.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          os << "box";
          vec(s.lower);
          vec(s.upper);
        } else {
          os << "ball";
          vec(s.ball.center);
          os << 'r' << s.ball.radius << '&' << s.base->describe();
        }
      },
      shape_);
  return os.str();
}

void project_inplace(const DecisionSet& set, Vec& x) {
  check_dim(set, x);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          project_ball(s, x);
        } else if constexpr (std::is_same_v<T, Box>) {
          project_box(s, x);
        } else {
          if (in_ball(s.ball, x, 0.0) && s.base->contains(x, 0.0)) return;
          dykstra(s, x);
        }
      },
      set.shape());
}

Vec project(const DecisionSet& set, const Vec& point) {
  Vec x = point;
  project_inplace(set, x);
  return x;
}

double diameter(const DecisionSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>)
          return 2.0 * s.radius;
        else if constexpr (std::is_same_v<T, Box>)
          return (s.upper - s.lower).norm();
        else
          return 2.0 * s.ball.radius;
      },
      set.shape());
}

void sample_unit_into(UnitKind kind, Rng& rng, Vec& out) {
  const Eigen::Index d = out.size();
  double n2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) out[i] = rng.normal();
    n2 = out.squaredNorm();
  } while (n2 == 0.0);
  out /= std::sqrt(n2);
  if (kind == UnitKind::Ball) out *= std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
}

UnitSample sample_unit(UnitKind kind, int d, Rng& rng) {
  require(d >= 1, "sample_unit: d must be at least 1");
  UnitSample s{Vec(d), kind};
  sample_unit_into(kind, rng, s.vector);
  return s;
}

Vec sample_uniform(const DecisionSet& set, Rng& rng) {
  const int d = set.dim();
  return std::visit(
      [&](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        Vec u(d);
        if constexpr (std::is_same_v<T, Ball>) {
          sample_unit_into(UnitKind::Ball, rng, u);
          return s.center + s.radius * u;
        } else if constexpr (std::is_same_v<T, Box>) {
          for (int i = 0; i < d; ++i) u[i] = s.lower[i] + (s.upper[i] - s.lower[i]) * rng.uniform();
          return u;
        } else {
          constexpr long kMaxTries = 10'000'000;
          for (long k = 0; k < kMaxTries; ++k) {
            sample_unit_into(UnitKind::Ball, rng, u);
            Vec x = s.ball.center + s.ball.radius * u;
            if (s.base->contains(x, 0.0)) return x;
          }
          throw NumericalFailure("rejection sampling: acceptance rate below 1e-6", 0.0);
        }
      },
      set.shape());
}

}  // namespace gradopt
