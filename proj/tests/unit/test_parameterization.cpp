#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "../support/networks.hpp"
#include "../support/oracles.hpp"
#include "tjflow/errors.hpp"
#include "tjflow/parameterization.hpp"

using namespace tjflow;

namespace {

// Smooth test state on the model grid with the junction constraints imposed.
GraphState smooth_state(const GraphModel& model, int n, double eps) {
  GraphState s = GraphState::zero(n);
  const auto& net = model.network();
  for (int i = 0; i < 3; ++i) {
    const double l = net.length[static_cast<std::size_t>(i)];
    for (int j = 0; j <= n; ++j) {
      const double x = l * j / n;
      s.rho[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          eps * (std::cos(3.0 * x + i) + 0.5 * std::sin(2.0 * x - i));
    }
  }
  const Vec3 g = net.tensions.vec();
  const Vec3 shift = (g.dot(s.rho0()) / g.squaredNorm()) * g;
  for (int i = 0; i < 3; ++i) s.rho[static_cast<std::size_t>(i)][0] -= shift[i];
  s.mu = net.q.q * s.rho0();
  return s;
}

}  // namespace

TEST(MuBoundary, ZeroOffsetIsLength) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const StationaryNetwork net = tjtest::trefoil_network(d);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(mu_boundary(net, d, i, 0.0), net.length[static_cast<std::size_t>(i)]);
}

TEST(MuBoundary, DiskChord) {
  const ImplicitDomain d = ImplicitDomain::circle(1.0);
  const StationaryNetwork net = tjtest::disk_network(d);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(mu_boundary(net, d, i, 0.1), std::sqrt(0.99), 1e-9);
}

TEST(MuBoundary, SecondDifferenceIsBoundaryCurvature) {
  const ImplicitDomain disk = ImplicitDomain::circle(1.0);
  const StationaryNetwork dn = tjtest::disk_network(disk);
  const double q = 1e-3;
  for (int i = 0; i < 3; ++i) {
    const double l = dn.length[static_cast<std::size_t>(i)];
    const double second = (mu_boundary(dn, disk, i, q) + mu_boundary(dn, disk, i, -q) - 2.0 * l) / (q * q);
    EXPECT_NEAR(second, dn.h[static_cast<std::size_t>(i)], 1e-3);
  }
  const ImplicitDomain tre = tjtest::unstable_domain();
  const StationaryNetwork tn = tjtest::unstable_network(tre);
  for (int i = 0; i < 3; ++i) {
    const double l = tn.length[static_cast<std::size_t>(i)];
    const double second = (mu_boundary(tn, tre, i, q) + mu_boundary(tn, tre, i, -q) - 2.0 * l) / (q * q);
    EXPECT_NEAR(second, tn.h[static_cast<std::size_t>(i)], 1e-3);
  }
}

TEST(PsiMap, ReferenceIdentities) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const StationaryNetwork net = tjtest::trefoil_network(d);
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double l = net.length[ii];
    for (double sigma : {0.0, 0.3 * l, 0.8 * l, l}) {
      EXPECT_LT((psi_map(net, d, i, sigma, 0.0, 0.0) - net.reference_point(i, sigma)).norm(), 1e-14);
      const ChartJet c = psi_derivatives(net, d, i, sigma, 0.0, 0.0);
      EXPECT_LT((c.s - net.tangent[ii]).norm(), 1e-12);
      EXPECT_LT((c.q - net.normal[ii]).norm(), 1e-12);
      EXPECT_LT((c.mu - (1.0 - sigma / l) * net.tangent[ii]).norm(), 1e-12);
      EXPECT_LT(c.ss.norm(), 1e-12);
      EXPECT_LT(c.sq.norm(), 1e-12);
      EXPECT_LT((c.smu + net.tangent[ii] / l).norm(), 1e-12);
      EXPECT_LT(c.ssq.norm(), 1e-12);
      EXPECT_LT(c.ssmu.norm(), 1e-12);
    }
  }
}

TEST(PsiMap, IdentitiesAgainstFiniteDifferences) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const StationaryNetwork net = tjtest::unstable_network(d);
  const double e = 1e-5;
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double l = net.length[ii];
    for (double sigma : {0.2 * l, 0.7 * l}) {
      auto map = [&](double s, double q, double m) { return psi_map(net, d, i, s, q, m); };
      const Vec2 s1 = (map(sigma + e, 0, 0) - map(sigma - e, 0, 0)) / (2 * e);
      const Vec2 q1 = (map(sigma, e, 0) - map(sigma, -e, 0)) / (2 * e);
      const Vec2 m1 = (map(sigma, 0, e) - map(sigma, 0, -e)) / (2 * e);
      EXPECT_LT((s1 - net.tangent[ii]).norm(), 1e-8);
      EXPECT_LT((q1 - net.normal[ii]).norm(), 1e-8);
      EXPECT_LT((m1 - (1.0 - sigma / l) * net.tangent[ii]).norm(), 1e-8);
      const double e2 = 1e-4;
      const Vec2 ss = (map(sigma + e2, 0, 0) - 2.0 * map(sigma, 0, 0) + map(sigma - e2, 0, 0)) / (e2 * e2);
      const Vec2 sq = (map(sigma + e2, e2, 0) - map(sigma + e2, -e2, 0) - map(sigma - e2, e2, 0) +
                       map(sigma - e2, -e2, 0)) /
                      (4 * e2 * e2);
      const Vec2 sm = (map(sigma + e2, 0, e2) - map(sigma + e2, 0, -e2) - map(sigma - e2, 0, e2) +
                       map(sigma - e2, 0, -e2)) /
                      (4 * e2 * e2);
      EXPECT_LT(ss.norm(), 1e-6);
      EXPECT_LT(sq.norm(), 1e-6);
      EXPECT_LT((sm + net.tangent[ii] / l).norm(), 1e-6);
    }
  }
}

TEST(PsiMap, AnalyticDerivativesAwayFromReference) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const StationaryNetwork net = tjtest::unstable_network(d);
  const double e = 1e-5;
  for (int i = 0; i < 3; ++i) {
    const double sigma = 0.6 * net.length[static_cast<std::size_t>(i)];
    const double q = 0.04, m = -0.03;
    auto map = [&](double s, double qq, double mm) { return psi_map(net, d, i, s, qq, mm); };
    const ChartJet c = psi_derivatives(net, d, i, sigma, q, m);
    EXPECT_LT((c.s - (map(sigma + e, q, m) - map(sigma - e, q, m)) / (2 * e)).norm(), 1e-8);
    EXPECT_LT((c.q - (map(sigma, q + e, m) - map(sigma, q - e, m)) / (2 * e)).norm(), 1e-8);
    EXPECT_LT((c.mu - (map(sigma, q, m + e) - map(sigma, q, m - e)) / (2 * e)).norm(), 1e-8);
    const double e2 = 1e-4;
    const Vec2 qq = (map(sigma, q + e2, m) - 2.0 * map(sigma, q, m) + map(sigma, q - e2, m)) / (e2 * e2);
    EXPECT_LT((c.qq - qq).norm(), 1e-6);
  }
}

TEST(CurveFromGraph, ZeroStateIsReference) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const StationaryNetwork net = tjtest::trefoil_network(d);
  const auto curves = curve_from_graph(net, d, GraphState::zero(20));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double s = net.length[static_cast<std::size_t>(i)] * j / 20.0;
      EXPECT_LT((curves[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - net.reference_point(i, s)).norm(),
                1e-14);
    }
}

TEST(CurveFromGraph, CommonJunctionAndEndpointsOnBoundary) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const StationaryNetwork net = tjtest::unstable_network(d);
  const GraphModel model(net, d);
  const GraphState s = smooth_state(model, 40, 0.03);
  const auto curves = model.curve(s);
  EXPECT_LT((curves[0].front() - curves[1].front()).norm(), 1e-9);
  EXPECT_LT((curves[0].front() - curves[2].front()).norm(), 1e-9);
  for (const auto& c : curves) EXPECT_LT(std::abs(d.psi(c.back())), 1e-9);
}

TEST(Metric, ReferenceAndMuDerivative) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const StationaryNetwork net = tjtest::trefoil_network(d);
  const GraphModel model(net, d);
  for (int i = 0; i < 3; ++i) {
    const auto& ch = model.chart(i);
    const double l = ch.length();
    EXPECT_NEAR(ch.metric(0.4 * l, 0.0, 0.0, 0.0), 1.0, 1e-14);
    const double eps = 1e-6, mu = 0.7;
    EXPECT_NEAR((ch.metric(0.4 * l, 0.0, 0.0, eps * mu) - 1.0) / eps, -mu / l, 1e-6);
  }
}

TEST(Metric, FlatBoundaryReducesToCartesianGraph) {
  // psi = x - 1 is met perpendicularly by the branch along (1, 0).
  const ImplicitDomain d = ImplicitDomain::polynomial({{1, 0, 1.0}, {0, 0, -1.0}}, {-3, 3, -3, 3});
  const StationaryNetwork net = abstract_network(SurfaceTensions{}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
  const BranchChart ch(net, std::make_shared<const ImplicitDomain>(d), 0);
  for (double rs : {0.0, 0.3, -0.7}) {
    EXPECT_NEAR(ch.metric(0.5, 0.1, rs, 0.0), std::sqrt(1.0 + rs * rs), 1e-13);
    const double rss = 1.7;
    EXPECT_NEAR(ch.curvature(0.5, 0.1, rs, rss, 0.0), rss / std::pow(1.0 + rs * rs, 1.5), 1e-13);
  }
}

TEST(Curvature, ZeroStateIsStraight) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  const Coefficients c = model.coefficients(GraphState::zero(16));
  for (const auto& k : c.kappa)
    for (double v : k) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(Curvature, MatchesGeometricCurvatureAtSecondOrder) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const StationaryNetwork net = tjtest::unstable_network(d);
  const GraphModel model(net, d);
  // Analytic profile rho = eps cos(3 sigma + 1): chart curvature with exact
  // derivatives against the discrete curvature of the mapped points.
  const double eps = 0.04;
  const int branch = 1;
  const auto& ch = model.chart(branch);
  const double l = ch.length();
  const double sigma0 = 0.5 * l;
  auto rho = [&](double s) { return eps * std::cos(3.0 * s + 1.0); };
  const double exact = ch.curvature(sigma0, rho(sigma0), -3.0 * eps * std::sin(3.0 * sigma0 + 1.0),
                                    -9.0 * eps * std::cos(3.0 * sigma0 + 1.0), 0.0);
  auto discrete = [&](double h) {
    const Vec2 a = ch.map(sigma0 - h, rho(sigma0 - h), 0.0);
    const Vec2 b = ch.map(sigma0, rho(sigma0), 0.0);
    const Vec2 c = ch.map(sigma0 + h, rho(sigma0 + h), 0.0);
    const Vec2 x1 = (c - a) / (2.0 * h);
    const Vec2 x2 = (c - 2.0 * b + a) / (h * h);
    return (x1.x() * x2.y() - x1.y() * x2.x()) / std::pow(x1.norm(), 3);
  };
  const double e1 = std::abs(discrete(l / 20.0) - exact);
  const double e2 = std::abs(discrete(l / 40.0) - exact);
  EXPECT_GT(oracle::observed_order(e1, e2), 1.9);
  EXPECT_LT(e2, 1e-3);
}

TEST(Coefficients, ZeroState) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  const Coefficients c = model.coefficients(GraphState::zero(16));
  EXPECT_NEAR(c.det_m, 1.0, 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= 16; ++j) {
      const auto ii = static_cast<std::size_t>(i);
      const auto jj = static_cast<std::size_t>(j);
      EXPECT_NEAR(c.Lambda[ii][jj], 0.0, 1e-12);
      EXPECT_NEAR(c.a[ii][jj], 1.0, 1e-12);
      EXPECT_NEAR(c.L[ii][jj], 1.0, 1e-12);
    }
  EXPECT_NEAR(det_m(model.network().q, Vec3::Zero()), 1.0, 1e-12);
}

TEST(Coefficients, FloorViolationIsReported) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  try {
    model.coefficients(GraphState::zero(16), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MatrixMNotInvertible);
  }
}

TEST(JunctionResiduals, ZeroAndLinearization) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  const auto& a = model.network().angles;
  EXPECT_LT(model.junction_residuals(Vec3::Zero(), Vec3::Zero(), Vec3::Zero()).norm(), 1e-15);
  const double eps = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Vec3 slope = Vec3::Zero();
    slope[k] = eps;
    const Vec2 g = model.junction_residuals(Vec3::Zero(), slope, Vec3::Zero()) / eps;
    const double lin12 = (slope[0] - slope[1]) / eps * a.s[2];
    const double lin13 = (slope[2] - slope[0]) / eps * a.s[1];
    EXPECT_NEAR(g[0], lin12, 1e-5);
    EXPECT_NEAR(g[1], lin13, 1e-5);
  }
}

TEST(OuterResidual, DiskLinearization) {
  const ImplicitDomain d = ImplicitDomain::circle(1.0);
  const StationaryNetwork net = tjtest::disk_network(d);
  const GraphModel model(net, d);
  for (int i = 0; i < 3; ++i) {
    const auto& ch = model.chart(i);
    const double r0 = ch.outer_residual(0.0, 0.0, 0.0);
    EXPECT_NEAR(r0, 0.0, 1e-10);
    const double eps = 1e-6;
    EXPECT_NEAR((ch.outer_residual(eps, 0.0, 0.0) - r0) / eps, net.h[static_cast<std::size_t>(i)], 1e-5);
    EXPECT_NEAR((ch.outer_residual(0.0, eps, 0.0) - r0) / eps, 1.0, 1e-5);
  }
}

TEST(OuterResidual, LinearizationOnPolynomialDomain) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const StationaryNetwork net = tjtest::unstable_network(d);
  const GraphModel model(net, d);
  const double eps = 1e-6;
  for (int i = 0; i < 3; ++i) {
    const auto& ch = model.chart(i);
    const double r0 = ch.outer_residual(0.0, 0.0, 0.0);
    EXPECT_NEAR((ch.outer_residual(eps, 0.0, 0.0) - ch.outer_residual(-eps, 0.0, 0.0)) / (2 * eps),
                net.h[static_cast<std::size_t>(i)], 1e-7);
    EXPECT_NEAR((ch.outer_residual(0.0, eps, 0.0) - r0) / eps, 1.0, 1e-5);
  }
}
