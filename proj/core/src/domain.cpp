#include "tjflow/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "tjflow/errors.hpp"

namespace tjflow {

double BoundingBox::diagonal() const { return std::hypot(xmax - xmin, ymax - ymin); }

ImplicitDomain ImplicitDomain::circle(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::ValidationError, "circle radius must be positive");
  ImplicitDomain d;
  d.family_ = Family::Circle;
  d.a_ = d.b_ = radius;
  d.box_ = {-1.5 * radius, 1.5 * radius, -1.5 * radius, 1.5 * radius};
  return d;
}

ImplicitDomain ImplicitDomain::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::ValidationError, "ellipse semi-axes must be positive");
  ImplicitDomain d;
  d.family_ = Family::Ellipse;
  d.a_ = a;
  d.b_ = b;
  d.box_ = {-1.5 * a, 1.5 * a, -1.5 * b, 1.5 * b};
  return d;
}

ImplicitDomain ImplicitDomain::polynomial(std::vector<PolynomialTerm> terms, const BoundingBox& box) {
  if (terms.empty()) throw Error(ErrorCode::ValidationError, "polynomial domain needs at least one term");
  if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin))
    throw Error(ErrorCode::ValidationError, "bounding box is empty");
  ImplicitDomain d;
  d.family_ = Family::Polynomial;
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0) throw Error(ErrorCode::ValidationError, "negative monomial exponent");
    if (t.i > kMaxDegree || t.j > kMaxDegree)
      throw Error(ErrorCode::ValidationError, "monomial exponents are limited to " + std::to_string(kMaxDegree));
    d.degree_ = std::max({d.degree_, t.i, t.j});
  }
  d.terms_ = std::move(terms);
  d.box_ = box;
  return d;
}

LevelSetJet ImplicitDomain::jet(const Vec2& x) const {
  LevelSetJet j;
  switch (family_) {
    case Family::Circle: {
      j.value = x.squaredNorm() - a_ * a_;
      j.grad = 2.0 * x;
      j.hess = 2.0 * Mat2::Identity();
      break;
    }
    case Family::Ellipse: {
      const double ia = 1.0 / (a_ * a_);
      const double ib = 1.0 / (b_ * b_);
      j.value = x.x() * x.x() * ia + x.y() * x.y() * ib - 1.0;
      j.grad = {2.0 * x.x() * ia, 2.0 * x.y() * ib};
      j.hess << 2.0 * ia, 0.0, 0.0, 2.0 * ib;
      break;
    }
    case Family::Polynomial: {
      // Powers with two leading zeros so that x^(i-1), x^(i-2) need no branches.
      constexpr int kPad = 2;
      std::array<double, kMaxDegree + 1 + kPad> xs{};
      std::array<double, kMaxDegree + 1 + kPad> ys{};
      double* xp = xs.data() + kPad;
      double* yp = ys.data() + kPad;
      xp[0] = yp[0] = 1.0;
      for (int k = 1; k <= degree_; ++k) {
        xp[k] = xp[k - 1] * x.x();
        yp[k] = yp[k - 1] * x.y();
      }
      double v = 0.0, gx = 0.0, gy = 0.0, hxx = 0.0, hxy = 0.0, hyy = 0.0;
      for (const auto& t : terms_) {
        const int i = t.i;
        const int k = t.j;
        const double c = t.c;
        v += c * xp[i] * yp[k];
        gx += c * i * xp[i - 1] * yp[k];
        gy += c * k * xp[i] * yp[k - 1];
        hxx += c * i * (i - 1) * xp[i - 2] * yp[k];
        hxy += c * i * k * xp[i - 1] * yp[k - 1];
        hyy += c * k * (k - 1) * xp[i] * yp[k - 2];
      }
      j.value = v;
      j.grad = {gx, gy};
      j.hess << hxx, hxy, hxy, hyy;
      break;
    }
  }
  return j;
}

double ImplicitDomain::psi(const Vec2& x) const {
  switch (family_) {
    case Family::Circle: return x.squaredNorm() - a_ * a_;
    case Family::Ellipse: return x.x() * x.x() / (a_ * a_) + x.y() * x.y() / (b_ * b_) - 1.0;
    case Family::Polynomial: return jet(x).value;
  }
  return 0.0;
}

Vec2 ImplicitDomain::grad(const Vec2& x) const { return jet(x).grad; }

Mat2 ImplicitDomain::hess(const Vec2& x) const { return jet(x).hess; }

std::string ImplicitDomain::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case Family::Circle: os << "circle radius=" << a_; break;
    case Family::Ellipse: os << "ellipse a=" << a_ << " b=" << b_; break;
    case Family::Polynomial: {
      os << "polynomial";
      for (const auto& t : terms_) os << " (" << t.i << "," << t.j << "," << t.c << ")";
      break;
    }
  }
  return os.str();
}

double boundary_curvature(const ImplicitDomain& domain, const Vec2& x) {
  const LevelSetJet j = domain.jet(x);
  const double g = j.grad.norm();
  if (!(g > 1e-12)) throw Error(ErrorCode::SingularGradient, "gradient of psi vanishes at the boundary point");
  if (std::abs(j.value) > 1e-8 * std::max(1.0, g * (1.0 + x.norm())))
    throw Error(ErrorCode::NotOnBoundary, "point is not on the level set psi = 0");
  const Vec2 t = rot90(j.grad / g);
  return -t.dot(j.hess * t) / g;
}

namespace {

// Safeguarded Newton on a bracket [lo, hi] with f(lo) < 0 <= f(hi).
double refine_root(const ImplicitDomain& domain, const Vec2& origin, const Vec2& dir, double lo, double hi) {
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const LevelSetJet j = domain.jet(origin + t * dir);
    if (j.value == 0.0) return t;
    if (j.value < 0.0) lo = t; else hi = t;
    const double slope = j.grad.dot(dir);
    double next = (slope != 0.0) ? t - j.value / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      t = next;
      break;
    }
    t = next;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
  }
  return t;
}

}  // namespace

BoundaryHit boundary_hit(const ImplicitDomain& domain, const Vec2& origin, const Vec2& direction) {
  const double dn = direction.norm();
  if (!(dn > 0.0)) throw Error(ErrorCode::NoIntersection, "zero direction");
  const Vec2 dir = direction / dn;
  if (!(domain.psi(origin) < 0.0))
    throw Error(ErrorCode::NoIntersection, "ray origin is not inside the domain");
  const BoundingBox& box = domain.box();
  const double step = box.diagonal() / 1024.0;
  double prev = 0.0;
  double t = 0.0;
  while (true) {
    t += step;
    const Vec2 x = origin + t * dir;
    if (!box.contains(x)) break;
    if (domain.psi(x) >= 0.0) {
      const double root = refine_root(domain, origin, dir, prev, t);
      return {origin + root * dir, root};
    }
    prev = t;
  }
  throw Error(ErrorCode::NoIntersection, "ray leaves the bounding box without crossing the boundary");
}

}  // namespace tjflow
