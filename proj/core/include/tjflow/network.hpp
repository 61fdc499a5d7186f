#pragma once

#include <array>
#include <vector>

#include "tjflow/domain.hpp"
#include "tjflow/tension_algebra.hpp"

namespace tjflow {

// Three straight segments from p_star meeting the boundary at right angles.
struct StationaryNetwork {
  SurfaceTensions tensions;
  JunctionAngles angles;
  JunctionMatrix q;
  Vec2 p_star = Vec2::Zero();
  double phi = 0.0;
  std::array<Vec2, 3> tangent{};
  std::array<Vec2, 3> normal{};
  std::array<double, 3> length{};
  std::array<double, 3> h{};
  std::array<Vec2, 3> endpoint{};

  Vec2 reference_point(int i, double sigma) const { return p_star + sigma * tangent[i]; }
};

// Network with given lengths and endpoint curvatures and no domain attached.
// Used for the linearized problem, which depends only on (l, h, gamma).
StationaryNetwork abstract_network(const SurfaceTensions& tensions, const std::array<double, 3>& length,
                                   const std::array<double, 3>& h);

struct NetworkCheck {
  double force_balance = 0.0;
  double endpoint_psi = 0.0;
  double perpendicularity = 0.0;
  double angle_error = 0.0;
};

NetworkCheck check_network(const StationaryNetwork& network, const ImplicitDomain& domain);

// Normal offsets rho^i on n + 1 uniform nodes of [0, l^i] plus tangential
// junction offsets mu.
struct GraphState {
  int n = 0;
  std::array<std::vector<double>, 3> rho;
  Vec3 mu = Vec3::Zero();
  double t = 0.0;

  static GraphState zero(int n);
  Vec3 rho0() const { return {rho[0].front(), rho[1].front(), rho[2].front()}; }
  Vec3 rho_end() const { return {rho[0].back(), rho[1].back(), rho[2].back()}; }
  double max_abs() const;
};

// Second-order first and second derivatives on a uniform grid; one-sided at the ends.
struct GridDerivatives {
  std::vector<double> d1;
  std::vector<double> d2;
};

GridDerivatives grid_derivatives(const std::vector<double>& f, double h);

double d1_start(const std::vector<double>& f, double h);
double d1_end(const std::vector<double>& f, double h);
double d2_start(const std::vector<double>& f, double h);
double d2_end(const std::vector<double>& f, double h);

}  // namespace tjflow
