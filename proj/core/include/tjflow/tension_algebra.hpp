#pragma once

#include <array>

#include "tjflow/types.hpp"

namespace tjflow {

// Surface tensions gamma^i; mobilities are fixed to beta^i = gamma^i.
struct SurfaceTensions {
  std::array<double, 3> gamma{1.0, 1.0, 1.0};

  Vec3 vec() const { return {gamma[0], gamma[1], gamma[2]}; }
};

// theta[k] is the angle between the tangents of the two other branches,
// with (i, j, k) cyclic in (0, 1, 2).
struct JunctionAngles {
  std::array<double, 3> theta{};
  std::array<double, 3> c{};
  std::array<double, 3> s{};
};

struct JunctionMatrix {
  Mat3 q = Mat3::Zero();
  double d = 0.0;
};

// Throws TensionsDegenerate unless every gamma is positive and the strict
// triangle inequality holds.
void validate_tensions(const SurfaceTensions& tensions);

JunctionAngles young_angles(const SurfaceTensions& tensions);

JunctionMatrix junction_matrix(const JunctionAngles& angles);

// |sum gamma^i T^i|.
double force_balance_residual(const std::array<Vec2, 3>& tangents, const SurfaceTensions& tensions);

// Unit tangents at the junction: T^1 at angle phi, T^2 = rotation of T^1 by
// theta^3, T^3 = rotation of T^2 by theta^1.
std::array<Vec2, 3> junction_tangents(const JunctionAngles& angles, double phi);

// Largest deviation of sin(theta^i)/gamma^i from their mean, relative to the mean.
double sine_law_residual(const JunctionAngles& angles, const SurfaceTensions& tensions);

// |theta^1 + theta^2 + theta^3 - 2 pi|.
double angle_sum_residual(const JunctionAngles& angles);

// Largest pairwise mismatch of mu^i T^i + rho0^i N^i over the three branches.
double stick_residual(const std::array<Vec2, 3>& tangents, const Vec3& mu, const Vec3& rho0);

}  // namespace tjflow
