#include <gtest/gtest.h>

#include <cmath>

#include "../support/networks.hpp"
#include "tjflow/errors.hpp"
#include "tjflow/evolution.hpp"
#include "tjflow/stationary.hpp"

using namespace tjflow;

namespace {

EvolveConfig config_for(const StationaryNetwork& net, int n, double factor = 0.25) {
  EvolveConfig c;
  c.n = n;
  const double lmin = std::min({net.length[0], net.length[1], net.length[2]});
  c.dt = factor * (lmin / n) * (lmin / n);
  return c;
}

double constraint(const StationaryNetwork& net, const GraphState& s) { return net.tensions.vec().dot(s.rho0()); }

Perturbation cosine_perturbation(double amp) {
  Perturbation p;
  p.kind = Perturbation::Kind::Cosine;
  p.amplitude = amp;
  p.cosine = {std::vector<double>{0.3, 1.0, 0.2}, std::vector<double>{-0.5, 0.0, 0.7}, std::vector<double>{0.4, -0.6}};
  return p;
}

}  // namespace

TEST(InitialState, ZeroPerturbation) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  const GraphState s = initial_state(model, Perturbation{}, config_for(model.network(), 40));
  EXPECT_EQ(s.max_abs(), 0.0);
  EXPECT_LT(boundary_residual(model, s), 1e-14);
}

TEST(InitialState, EigenmodeIsCompatible) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  const EvolveConfig c = config_for(model.network(), 100);
  const GraphState s = initial_state(model, eigenmode_perturbation(model.network(), c.n, 1e-2), c);
  EXPECT_LT(boundary_residual(model, s), 1e-10);
  EXPECT_LT(std::abs(constraint(model.network(), s)), 1e-12);
  EXPECT_LT((s.mu - model.network().q.q * s.rho0()).norm(), 1e-12);
  EXPECT_NEAR(s.max_abs(), 1e-2, 2e-3);
}

TEST(InitialState, ProjectsOntoConstraint) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const GraphModel model(tjtest::unstable_network(d), d);
  const GraphState s = initial_state(model, cosine_perturbation(1e-2), config_for(model.network(), 60));
  EXPECT_LT(std::abs(constraint(model.network(), s)), 1e-12);
  EXPECT_LT(boundary_residual(model, s), 1e-10);
}

TEST(Step, ZeroStateIsAFixedPoint) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  const EvolveConfig c = config_for(model.network(), 40);
  GraphState s = GraphState::zero(40);
  for (int k = 0; k < 1000; ++k) s = step(model, s, c);
  EXPECT_LT(s.max_abs(), 1e-14);
  EXPECT_NEAR(s.t, 1000 * c.dt, 1e-12);
}

TEST(Step, PreservesConstraintsAndLowersEnergy) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const GraphModel model(tjtest::unstable_network(d), d);
  const EvolveConfig c = config_for(model.network(), 60);
  GraphState s = initial_state(model, cosine_perturbation(2e-2), c);
  double e0 = make_record(model, s).E;
  for (int k = 0; k < 20; ++k) {
    s = step(model, s, c);
    EXPECT_LT(std::abs(constraint(model.network(), s)), 1e-12);
    EXPECT_LT((s.mu - model.network().q.q * s.rho0()).norm(), 1e-12);
    EXPECT_LT(boundary_residual(model, s), c.newton_tol);
    const double e1 = make_record(model, s).E;
    EXPECT_LT(e1, e0);
    e0 = e1;
  }
}

TEST(Step, StepSizeGuard) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  EvolveConfig c = config_for(model.network(), 40, 0.6);
  try {
    step(model, GraphState::zero(40), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CflViolation);
  }
}

TEST(Run, ZeroInitIsConstant) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  EvolveConfig c = config_for(model.network(), 40);
  c.t_end = 50 * c.dt;
  c.output_every = 10;
  const Trajectory tr = run(model, GraphState::zero(40), c);
  EXPECT_EQ(tr.status, RunStatus::Completed);
  EXPECT_EQ(tr.records.size(), 6u);
  for (const auto& r : tr.records) {
    EXPECT_NEAR(r.E, 3.0, 1e-12);
    EXPECT_LT(r.kappa.l2_sq, 1e-24);
  }
}

TEST(Run, LinearRegimeFollowsTopEigenvalue) {
  const ImplicitDomain d = ImplicitDomain::circle(1.0);
  const StationaryNetwork net = tjtest::disk_network(d);
  const GraphModel model(net, d);
  EvolveConfig c = config_for(net, 200);
  const double lambda = max_eigenvalue(net, 200).lambda_max;
  const GraphState init = initial_state(model, eigenmode_perturbation(net, 200, 1e-3), c);
  c.t_end = 0.5;
  c.output_every = 1000000;
  const Trajectory tr = run(model, init, c);
  ASSERT_EQ(tr.status, RunStatus::Completed);
  const GraphState& fin = tr.states.back();
  const double growth = std::exp(lambda * fin.t);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < fin.rho[static_cast<std::size_t>(i)].size(); ++j) {
      const double e = fin.rho[static_cast<std::size_t>(i)][j] - growth * init.rho[static_cast<std::size_t>(i)][j];
      num += e * e;
      den += std::pow(growth * init.rho[static_cast<std::size_t>(i)][j], 2);
    }
  EXPECT_LT(std::sqrt(num / den), 0.05);
}

TEST(Run, UnstableNetworkLeavesTheVicinity) {
  const ImplicitDomain d = tjtest::unstable_domain();
  const StationaryNetwork net = tjtest::unstable_network(d);
  const GraphModel model(net, d);
  EvolveConfig c = config_for(net, 40, 0.45);
  c.t_end = 20.0;
  c.output_every = 200;
  c.max_amplitude = 0.1;
  const GraphState init = initial_state(model, eigenmode_perturbation(net, 40, 1e-2), c);
  const Trajectory tr = run(model, init, c);
  EXPECT_TRUE(tr.status == RunStatus::AmplitudeCap || tr.status == RunStatus::DetMFloor);
  EXPECT_FALSE(tr.message.empty());
  EXPECT_GT(tr.records.back().kappa.l2_sq, 10.0 * tr.records.front().kappa.l2_sq);
}

TEST(JunctionKinematics, StationaryAndDecaying) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const GraphModel model(tjtest::trefoil_network(d), d);
  EvolveConfig c = config_for(model.network(), 60);
  GraphState a = GraphState::zero(60);
  GraphState b = step(model, a, c);
  const JunctionVelocities z = junction_kinematics(model, a, b);
  EXPECT_LT(z.V.norm() + z.v.norm(), 1e-12);

  a = initial_state(model, eigenmode_perturbation(model.network(), 60, 1e-2), c);
  for (int k = 0; k < 200; ++k) a = step(model, a, c);
  b = step(model, a, c);
  const JunctionVelocities j = junction_kinematics(model, a, b);
  const Vec3 qv = model.network().q.q * j.V;
  EXPECT_LT((j.v - qv).norm(), 0.05 * j.V.norm() + 1e-9);
  EXPECT_LT(std::abs(model.network().tensions.vec().dot(j.v)), 0.05 * j.V.norm() + 1e-9);
}

TEST(H2Ratio, EigenmodeRatioIsNearlyConstant) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const StationaryNetwork net = tjtest::trefoil_network(d);
  const GraphModel model(net, d);
  EvolveConfig c = config_for(net, 60, 0.45);
  c.t_end = 0.3;
  c.output_every = 400;
  const GraphState init = initial_state(model, eigenmode_perturbation(net, 60, 1e-3), c);
  const Trajectory tr = run(model, init, c);
  const auto ratio = h2_ratio_series(model, tr.states);
  ASSERT_GT(ratio.size(), 3u);
  double lo = 1e300, hi = 0.0;
  for (std::size_t k = 1; k < ratio.size(); ++k) {
    lo = std::min(lo, ratio[k].ratio);
    hi = std::max(hi, ratio[k].ratio);
  }
  EXPECT_LT(hi / lo, 1.1);
  EXPECT_NEAR(h2_bound_check(model, tr.states), std::max(hi, ratio[0].ratio), 1e-12);
}

TEST(H2Ratio, AmplitudeHalving) {
  const ImplicitDomain d = tjtest::trefoil_domain();
  const StationaryNetwork net = tjtest::trefoil_network(d);
  const GraphModel model(net, d);
  const EvolveConfig c = config_for(net, 60);
  const GraphState a = initial_state(model, cosine_perturbation(2e-2), c);
  const GraphState b = initial_state(model, cosine_perturbation(1e-2), c);
  const double ra = h2_bound_check(model, {a});
  const double rb = h2_bound_check(model, {b});
  EXPECT_LT(std::abs(ra / rb - 1.0), 0.2);
}
