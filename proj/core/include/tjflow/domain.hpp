#pragma once

#include <string>
#include <vector>

#include "tjflow/types.hpp"

namespace tjflow {

struct LevelSetJet {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();
};

struct BoundingBox {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;

  bool contains(const Vec2& x) const {
    return x.x() >= xmin && x.x() <= xmax && x.y() >= ymin && x.y() <= ymax;
  }
  double diagonal() const;
};

// Monomial c x^i y^j.
struct PolynomialTerm {
  int i = 0;
  int j = 0;
  double c = 0.0;
};

// Omega = {psi < 0} with analytic gradient and Hessian.
class ImplicitDomain {
 public:
  static constexpr int kMaxDegree = 32;
  enum class Family { Circle, Ellipse, Polynomial };

  static ImplicitDomain circle(double radius);
  static ImplicitDomain ellipse(double a, double b);
  static ImplicitDomain polynomial(std::vector<PolynomialTerm> terms, const BoundingBox& box);

  Family family() const { return family_; }
  const BoundingBox& box() const { return box_; }
  const std::vector<PolynomialTerm>& terms() const { return terms_; }
  double radius() const { return a_; }
  double semi_axis_a() const { return a_; }
  double semi_axis_b() const { return b_; }

  double psi(const Vec2& x) const;
  Vec2 grad(const Vec2& x) const;
  Mat2 hess(const Vec2& x) const;
  LevelSetJet jet(const Vec2& x) const;

  std::string describe() const;

 private:
  ImplicitDomain() = default;

  Family family_ = Family::Circle;
  double a_ = 1.0;
  double b_ = 1.0;
  std::vector<PolynomialTerm> terms_;
  int degree_ = 0;
  BoundingBox box_;
};

// Curvature of the boundary at x: h = -(D2psi t, t)/|grad psi| with t the
// unit tangent. The unit disk gives h = -1 at every boundary point.
double boundary_curvature(const ImplicitDomain& domain, const Vec2& x);

struct BoundaryHit {
  Vec2 point = Vec2::Zero();
  double distance = 0.0;
};

// First crossing of psi = 0 along origin + t * direction, t > 0.
BoundaryHit boundary_hit(const ImplicitDomain& domain, const Vec2& origin, const Vec2& direction);

}  // namespace tjflow
