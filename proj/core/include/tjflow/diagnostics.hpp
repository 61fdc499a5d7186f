#pragma once

#include <array>
#include <limits>
#include <vector>

#include "tjflow/parameterization.hpp"

namespace tjflow {

// A curve on uniform arc-length nodes, starting at the junction.
struct CurveSample {
  std::vector<double> s;
  std::vector<Vec2> x;
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;
  std::vector<double> kappa;
  std::vector<double> kappa_s;
  std::vector<double> kappa_ss;
  double r = 0.0;
  double ds = 0.0;
};

using NetworkSample = std::array<CurveSample, 3>;

// Points are taken as uniformly spaced in their own parameter. nodes = 0
// keeps the input count.
CurveSample resample(const std::vector<Vec2>& points, int nodes = 0);

NetworkSample sample_network(const GraphModel& model, const GraphState& state);

double energy(const NetworkSample& sample, const SurfaceTensions& tensions);

struct CurvatureNorms {
  double l2_sq = 0.0;
  double l4_4 = 0.0;
  double linf = 0.0;
  double s_l2_sq = 0.0;
  double ss_l2_sq = 0.0;
};

CurvatureNorms curvature_norms(const NetworkSample& sample, const SurfaceTensions& tensions);

// Normal and tangential junction velocities.
struct JunctionVelocities {
  Vec3 V = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec2 p_rate = Vec2::Zero();
};

// Junction velocity fitted to V^i = kappa^i(0) in the least-squares sense.
JunctionVelocities velocities_from_curvature(const NetworkSample& sample);

struct ResidualBlock {
  double junction_kappa = 0.0;
  double flux = 0.0;
  double sum_v = 0.0;
  double outer = 0.0;
  double perp = 0.0;
};

ResidualBlock junction_and_robin_residuals(const NetworkSample& sample, const SurfaceTensions& tensions,
                                           const ImplicitDomain& domain, const JunctionVelocities& velocities);

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  CurvatureNorms kappa;
  ResidualBlock res;
  // ||v - Q kappa(0)|| with v from time differencing of the junction; NaN
  // when unavailable.
  double vqv = std::numeric_limits<double>::quiet_NaN();
  Vec2 p = Vec2::Zero();
  Vec3 h = Vec3::Zero();
  Vec3 mu = Vec3::Zero();
};

DiagnosticsRecord make_record(const GraphModel& model, const GraphState& state,
                              const JunctionVelocities* kinematic = nullptr);

// |dE/dt + ||kappa||^2| at interior records by centered differences.
std::vector<double> energy_law_residual(const std::vector<DiagnosticsRecord>& records);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// Least-squares fit of log(series) = intercept + rate t on the last `window`
// fraction of the samples with series > 1e-12.
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& series, double window = 0.5);

// Same fit on every sample with t in [t0, t1].
DecayFit decay_fit_range(const std::vector<double>& t, const std::vector<double>& series, double t0, double t1);

}  // namespace tjflow
