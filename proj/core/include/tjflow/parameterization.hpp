#pragma once

#include <array>
#include <memory>
#include <vector>

#include "tjflow/network.hpp"

namespace tjflow {

// mu_dOmega(q) and its first two derivatives.
struct BoundaryOffset {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Psi(sigma, q, mu) and the partial derivatives that enter the flow.
struct ChartJet {
  Vec2 psi = Vec2::Zero();
  Vec2 s = Vec2::Zero();
  Vec2 q = Vec2::Zero();
  Vec2 mu = Vec2::Zero();
  Vec2 ss = Vec2::Zero();
  Vec2 sq = Vec2::Zero();
  Vec2 smu = Vec2::Zero();
  Vec2 qq = Vec2::Zero();
  Vec2 ssq = Vec2::Zero();
  Vec2 ssmu = Vec2::Zero();
};

// Local quantities of the graph equation at one node.
struct NodeGeometry {
  double J = 1.0;
  double kappa = 0.0;
  double L = 1.0;
  double Lambda = 0.0;
  double a = 1.0;
  double D = 1.0;
};

// Stretched coordinates Psi^i around the reference segment of one branch.
class BranchChart {
 public:
  BranchChart(const StationaryNetwork& network, std::shared_ptr<const ImplicitDomain> domain, int branch);

  int branch() const { return branch_; }
  double length() const { return l_; }
  const Vec2& tangent() const { return t_; }
  const Vec2& normal() const { return n_; }

  BoundaryOffset mu_boundary(double q) const;
  Vec2 map(double sigma, double q, double mu) const;
  ChartJet jet(double sigma, double q, double mu) const;

  double metric(double sigma, double rho, double rho_s, double mu) const;
  double curvature(double sigma, double rho, double rho_s, double rho_ss, double mu) const;
  NodeGeometry node(double sigma, double rho, double rho_s, double rho_ss, double mu) const;

  // Normalized perpendicularity residual at sigma = l: b rho_s + g.
  double outer_residual(double rho, double rho_s, double mu) const;

  // Curve tangent Phi_sigma at sigma.
  Vec2 curve_velocity(double sigma, double rho, double rho_s, double mu) const;

 private:
  // Offset m with psi(p + m T + q N) = 0; `at` receives the level-set jet at
  // the root, with the gradient corrected to second order in the last step.
  double solve_offset(double q, LevelSetJet* at = nullptr) const;

  std::shared_ptr<const ImplicitDomain> domain_;
  int branch_ = 0;
  Vec2 p_ = Vec2::Zero();
  Vec2 t_ = Vec2::Zero();
  Vec2 n_ = Vec2::Zero();
  double l_ = 1.0;
  double h_ = 0.0;
  LevelSetJet end_jet_;
};

struct Coefficients {
  std::array<std::vector<double>, 3> L;
  std::array<std::vector<double>, 3> Lambda;
  std::array<std::vector<double>, 3> a;
  std::array<std::vector<double>, 3> J;
  std::array<std::vector<double>, 3> kappa;
  Mat3 M = Mat3::Identity();
  Mat3 a1 = Mat3::Zero();
  double det_m = 1.0;
  double min_det_m = 1.0;
};

// Network, domain and the three branch charts.
class GraphModel {
 public:
  GraphModel(const StationaryNetwork& network, const ImplicitDomain& domain);

  const StationaryNetwork& network() const { return network_; }
  const ImplicitDomain& domain() const { return *domain_; }
  const BranchChart& chart(int i) const { return charts_[static_cast<std::size_t>(i)]; }
  double spacing(int i, int n) const { return network_.length[static_cast<std::size_t>(i)] / n; }

  std::array<std::vector<Vec2>, 3> curve(const GraphState& state) const;

  // Throws MatrixMNotInvertible when det M drops to det_floor at any node
  // and DegenerateMetric when J < 1e-8.
  Coefficients coefficients(const GraphState& state, double det_floor = 0.5) const;

  // (g12, g13) at sigma = 0 from junction values and one-sided slopes.
  Vec2 junction_residuals(const Vec3& rho0, const Vec3& rho0_s, const Vec3& mu) const;
  Vec2 junction_residuals(const GraphState& state) const;
  double outer_residual(const GraphState& state, int i) const;

 private:
  StationaryNetwork network_;
  std::shared_ptr<const ImplicitDomain> domain_;
  std::vector<BranchChart> charts_;
};

// Free-function forms of the chart operations.
double mu_boundary(const StationaryNetwork& network, const ImplicitDomain& domain, int i, double q);
Vec2 psi_map(const StationaryNetwork& network, const ImplicitDomain& domain, int i, double sigma, double q,
             double mu);
ChartJet psi_derivatives(const StationaryNetwork& network, const ImplicitDomain& domain, int i, double sigma,
                         double q, double mu);
std::array<std::vector<Vec2>, 3> curve_from_graph(const StationaryNetwork& network, const ImplicitDomain& domain,
                                                  const GraphState& state);

// det M for the given Lambda values at one node.
double det_m(const JunctionMatrix& q, const Vec3& lambda);

}  // namespace tjflow
