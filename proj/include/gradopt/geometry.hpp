#pragma once

#include <memory>
#include <string>
#include <variant>

#include "gradopt/common.hpp"

namespace gradopt {

struct Ball {
  Vec center;
  double radius;
};

struct Box {
  Vec lower;
  Vec upper;
};

class DecisionSet;

struct Intersection {
  Ball ball;
  std::shared_ptr<const DecisionSet> base;
};

inline constexpr double kProjectionTol = 1e-9;
inline constexpr int kDykstraMaxIter = 10000;

class DecisionSet {
 public:
  using Shape = std::variant<Ball, Box, Intersection>;

  static DecisionSet ball(Vec center, double radius);
  static DecisionSet box(Vec lower, Vec upper);
  static DecisionSet intersection(Ball ball, const DecisionSet& base);

  int dim() const { return dim_; }
  const Shape& shape() const { return shape_; }
  bool contains(const Vec& x, double tol = kProjectionTol) const;
  std::string describe() const;

 private:
  DecisionSet(Shape s, int d) : shape_(std::move(s)), dim_(d) {}
  Shape shape_;
  int dim_;
};

// Euclidean projection. Intersections go through Dykstra.
Vec project(const DecisionSet& set, const Vec& point);
// Same, in place. No allocation for ball and box.
void project_inplace(const DecisionSet& set, Vec& x);

double diameter(const DecisionSet& set);

enum class UnitKind { Ball, Sphere };

struct UnitSample {
  Vec vector;
  UnitKind kind;
};

UnitSample sample_unit(UnitKind kind, int d, Rng& rng);
// Fills out (already sized to d) without allocating.
void sample_unit_into(UnitKind kind, Rng& rng, Vec& out);

Vec sample_uniform(const DecisionSet& set, Rng& rng);

}  // namespace gradopt
