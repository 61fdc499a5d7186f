#include "tjflow/parameterization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tjflow/errors.hpp"

namespace tjflow {

BranchChart::BranchChart(const StationaryNetwork& network, std::shared_ptr<const ImplicitDomain> domain,
                         int branch)
    : domain_(std::move(domain)), branch_(branch) {
  const auto i = static_cast<std::size_t>(branch);
  p_ = network.p_star;
  t_ = network.tangent[i];
  n_ = network.normal[i];
  l_ = network.length[i];
  h_ = network.h[i];
  end_jet_ = domain_->jet(p_ + l_ * t_);
}

double BranchChart::solve_offset(double q, LevelSetJet* at) const {
  if (q == 0.0) {
    if (at) *at = end_jet_;
    return l_;
  }
  double m = l_ + 0.5 * h_ * q * q;
  const Vec2 base = p_ + q * n_;
  for (int it = 0; it < 50; ++it) {
    LevelSetJet j = domain_->jet(base + m * t_);
    const double fm = j.grad.dot(t_);
    if (!(fm > 0.0)) break;
    const double dm = j.value / fm;
    m -= dm;
    // Quadratic convergence leaves an error of order dm^2 after this update.
    if (std::abs(dm) <= 1e-8 * std::max(1.0, std::abs(m))) {
      if (at) {
        // Shift the gradient to the updated point; the hessian lag only
        // enters second derivatives.
        j.grad -= dm * (j.hess * t_);
        j.value = 0.0;
        *at = j;
      }
      return m;
    }
  }
  // Newton left the outward-crossing basin: march from inside instead.
  if (domain_->psi(base) < 0.0) {
    const double hit = boundary_hit(*domain_, base, t_).distance;
    if (at) *at = domain_->jet(base + hit * t_);
    return hit;
  }
  throw Error(ErrorCode::OffsetMissesBoundary, "offset line does not meet the boundary near the endpoint");
}

BoundaryOffset BranchChart::mu_boundary(double q) const {
  BoundaryOffset out;
  LevelSetJet j;
  out.value = solve_offset(q, &j);
  const double fm = j.grad.dot(t_);
  if (!(fm > 0.0)) throw Error(ErrorCode::OffsetMissesBoundary, "offset line crosses the boundary tangentially");
  const double fq = j.grad.dot(n_);
  const double fmm = t_.dot(j.hess * t_);
  const double fqm = n_.dot(j.hess * t_);
  const double fqq = n_.dot(j.hess * n_);
  out.d1 = -fq / fm;
  out.d2 = -(fqq + 2.0 * fqm * out.d1 + fmm * out.d1 * out.d1) / fm;
  return out;
}

Vec2 BranchChart::map(double sigma, double q, double mu) const {
  const double m = solve_offset(q);
  const double xi = mu + (sigma / l_) * (m - mu);
  return p_ + xi * t_ + q * n_;
}

ChartJet BranchChart::jet(double sigma, double q, double mu) const {
  const BoundaryOffset m = mu_boundary(q);
  const double r = sigma / l_;
  ChartJet c;
  c.psi = p_ + (mu + r * (m.value - mu)) * t_ + q * n_;
  c.s = ((m.value - mu) / l_) * t_;
  c.q = r * m.d1 * t_ + n_;
  c.mu = (1.0 - r) * t_;
  c.ss = Vec2::Zero();
  c.sq = (m.d1 / l_) * t_;
  c.smu = -t_ / l_;
  c.qq = r * m.d2 * t_;
  c.ssq = Vec2::Zero();
  c.ssmu = Vec2::Zero();
  return c;
}

Vec2 BranchChart::curve_velocity(double sigma, double rho, double rho_s, double mu) const {
  const ChartJet c = jet(sigma, rho, mu);
  return c.s + c.q * rho_s;
}

double BranchChart::metric(double sigma, double rho, double rho_s, double mu) const {
  const double J = curve_velocity(sigma, rho, rho_s, mu).norm();
  if (!(J >= 1e-8)) throw Error(ErrorCode::DegenerateMetric, "metric J fell below 1e-8");
  return J;
}

NodeGeometry BranchChart::node(double sigma, double rho, double rho_s, double rho_ss, double mu) const {
  const ChartJet c = jet(sigma, rho, mu);
  const Vec2 phi_s = c.s + c.q * rho_s;
  NodeGeometry g;
  g.J = phi_s.norm();
  if (!(g.J >= 1e-8)) throw Error(ErrorCode::DegenerateMetric, "metric J fell below 1e-8");
  g.D = dot_rot(c.q, c.s);
  if (!(std::abs(g.D) > 1e-12)) throw Error(ErrorCode::DegenerateMetric, "chart is degenerate, (Psi_q, R Psi_s) = 0");
  const double first = 2.0 * dot_rot(c.sq, c.s) + dot_rot(c.ss, c.q);
  const double second = dot_rot(c.qq, c.s) + 2.0 * dot_rot(c.sq, c.q) + dot_rot(c.qq, c.q) * rho_s;
  const double numer = g.D * rho_ss + first * rho_s + second * rho_s * rho_s + dot_rot(c.ss, c.s);
  g.kappa = numer / (g.J * g.J * g.J);
  g.L = g.J / g.D;
  g.Lambda = -(dot_rot(c.mu, c.s) + dot_rot(c.mu, c.q) * rho_s) / g.D;
  g.a = 1.0 / (g.J * g.J);
  return g;
}

double BranchChart::curvature(double sigma, double rho, double rho_s, double rho_ss, double mu) const {
  return node(sigma, rho, rho_s, rho_ss, mu).kappa;
}

double BranchChart::outer_residual(double rho, double rho_s, double mu) const {
  const ChartJet c = jet(l_, rho, mu);
  const Vec2 g = domain_->grad(c.psi);
  const double gn = g.norm();
  if (!(gn > 1e-12)) throw Error(ErrorCode::SingularGradient, "gradient of psi vanishes at the endpoint");
  const double b = -rot90(c.q).dot(g) / gn;
  const double gg = -rot90(c.s).dot(g) / gn;
  return b * rho_s + gg;
}

GraphModel::GraphModel(const StationaryNetwork& network, const ImplicitDomain& domain)
    : network_(network), domain_(std::make_shared<const ImplicitDomain>(domain)) {
  charts_.reserve(3);
  for (int i = 0; i < 3; ++i) charts_.emplace_back(network_, domain_, i);
}

std::array<std::vector<Vec2>, 3> GraphModel::curve(const GraphState& state) const {
  std::array<std::vector<Vec2>, 3> out;
  for (int i = 0; i < 3; ++i) {
    const auto& rho = state.rho[static_cast<std::size_t>(i)];
    const double h = spacing(i, state.n);
    auto& pts = out[static_cast<std::size_t>(i)];
    pts.resize(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j)
      pts[j] = chart(i).map(static_cast<double>(j) * h, rho[j], state.mu[i]);
  }
  return out;
}

double det_m(const JunctionMatrix& q, const Vec3& lambda) {
  const Mat3 m = Mat3::Identity() - lambda.asDiagonal() * q.q;
  return m.determinant();
}

Coefficients GraphModel::coefficients(const GraphState& state, double det_floor) const {
  Coefficients co;
  const std::size_t m = static_cast<std::size_t>(state.n) + 1;
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double h = spacing(i, state.n);
    const GridDerivatives d = grid_derivatives(state.rho[ii], h);
    co.L[ii].resize(m);
    co.Lambda[ii].resize(m);
    co.a[ii].resize(m);
    co.J[ii].resize(m);
    co.kappa[ii].resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const NodeGeometry g =
          chart(i).node(static_cast<double>(j) * h, state.rho[ii][j], d.d1[j], d.d2[j], state.mu[i]);
      co.L[ii][j] = g.L;
      co.Lambda[ii][j] = g.Lambda;
      co.a[ii][j] = g.a;
      co.J[ii][j] = g.J;
      co.kappa[ii][j] = g.kappa;
    }
  }
  co.min_det_m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    const Vec3 lam(co.Lambda[0][j], co.Lambda[1][j], co.Lambda[2][j]);
    const double dm = det_m(network_.q, lam);
    co.min_det_m = std::min(co.min_det_m, dm);
  }
  const Vec3 lam0(co.Lambda[0][0], co.Lambda[1][0], co.Lambda[2][0]);
  co.M = Mat3::Identity() - lam0.asDiagonal() * network_.q.q;
  co.det_m = co.M.determinant();
  if (!(co.min_det_m > det_floor))
    throw Error(ErrorCode::MatrixMNotInvertible, "det M reached the admissibility floor");
  const Vec3 a0(co.a[0][0], co.a[1][0], co.a[2][0]);
  co.a1 = network_.q.q * co.M.inverse() * a0.asDiagonal();
  return co;
}

Vec2 GraphModel::junction_residuals(const Vec3& rho0, const Vec3& rho0_s, const Vec3& mu) const {
  std::array<Vec2, 3> v;
  for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] = chart(i).curve_velocity(0.0, rho0[i], rho0_s[i], mu[i]);
  const auto& c = network_.angles.c;
  const double g12 = v[0].dot(v[1]) - v[0].norm() * v[1].norm() * c[2];
  const double g13 = v[0].dot(v[2]) - v[0].norm() * v[2].norm() * c[1];
  return {g12, g13};
}

Vec2 GraphModel::junction_residuals(const GraphState& state) const {
  Vec3 slope;
  for (int i = 0; i < 3; ++i) slope[i] = d1_start(state.rho[static_cast<std::size_t>(i)], spacing(i, state.n));
  return junction_residuals(state.rho0(), slope, state.mu);
}

double GraphModel::outer_residual(const GraphState& state, int i) const {
  const auto& rho = state.rho[static_cast<std::size_t>(i)];
  return chart(i).outer_residual(rho.back(), d1_end(rho, spacing(i, state.n)), state.mu[i]);
}

double mu_boundary(const StationaryNetwork& network, const ImplicitDomain& domain, int i, double q) {
  return BranchChart(network, std::make_shared<const ImplicitDomain>(domain), i).mu_boundary(q).value;
}

Vec2 psi_map(const StationaryNetwork& network, const ImplicitDomain& domain, int i, double sigma, double q,
             double mu) {
  return BranchChart(network, std::make_shared<const ImplicitDomain>(domain), i).map(sigma, q, mu);
}

ChartJet psi_derivatives(const StationaryNetwork& network, const ImplicitDomain& domain, int i, double sigma,
                         double q, double mu) {
  return BranchChart(network, std::make_shared<const ImplicitDomain>(domain), i).jet(sigma, q, mu);
}

std::array<std::vector<Vec2>, 3> curve_from_graph(const StationaryNetwork& network, const ImplicitDomain& domain,
                                                  const GraphState& state) {
  return GraphModel(network, domain).curve(state);
}

}  // namespace tjflow
