#pragma once

#include <optional>
#include <vector>

#include "tjflow/parameterization.hpp"

namespace tjflow {

struct SteadyGuess {
  Vec2 p = Vec2::Zero();
  double phi = 0.0;
  std::optional<double> gauge;
};

struct SteadyOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double fd_step = 1e-7;
};

struct SteadyReport {
  int iterations = 0;
  double residual = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

// Component i is (N^i, grad psi/|grad psi|) where the ray from p along the
// Young direction d^i(phi) leaves the domain.
Vec3 steady_residual(const ImplicitDomain& domain, const SurfaceTensions& tensions, const Vec2& p, double phi);
Vec3 steady_residual(const ImplicitDomain& domain, const SurfaceTensions& tensions, const SteadyGuess& guess);

// Straight network from p along the Young directions rotated by phi.
StationaryNetwork build_network(const ImplicitDomain& domain, const SurfaceTensions& tensions, const Vec2& p,
                                double phi);

StationaryNetwork find_stationary(const ImplicitDomain& domain, const SurfaceTensions& tensions,
                                  const SteadyGuess& guess, const SteadyOptions& options = {},
                                  SteadyReport* report = nullptr);

struct RatioSample {
  double t = 0.0;
  double ratio = 0.0;
};

// ||rho||_{H2} / ||kappa||_{L2} per state, skipping states with ||kappa|| <= 1e-12.
std::vector<RatioSample> h2_ratio_series(const GraphModel& model, const std::vector<GraphState>& states);

// Supremum of the series above; 0 when every state is skipped.
double h2_bound_check(const GraphModel& model, const std::vector<GraphState>& states);

// gamma-weighted ||rho||_{L2} + ||rho_ss||_{L2} on the sigma grid.
double h2_norm(const StationaryNetwork& network, const GraphState& state);

}  // namespace tjflow
