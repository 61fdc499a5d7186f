#include "tjflow/tension_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tjflow/errors.hpp"

namespace tjflow {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TensionsDegenerate: return "TensionsDegenerate";
    case ErrorCode::NotOnBoundary: return "NotOnBoundary";
    case ErrorCode::SingularGradient: return "SingularGradient";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::OffsetMissesBoundary: return "OffsetMissesBoundary";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::MatrixMNotInvertible: return "MatrixMNotInvertible";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EigenSolveFailed: return "EigenSolveFailed";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::CompatibilityFailed: return "CompatibilityFailed";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::NonPositiveSeries: return "NonPositiveSeries";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  return code == ErrorCode::ParseError || code == ErrorCode::ValidationError ||
         code == ErrorCode::IoError || code == ErrorCode::TensionsDegenerate;
}

void validate_tensions(const SurfaceTensions& tensions) {
  const auto& g = tensions.gamma;
  for (int i = 0; i < 3; ++i) {
    if (!(g[i] > 0.0) || !std::isfinite(g[i])) {
      std::ostringstream msg;
      msg << "gamma" << i + 1 << " = " << g[i] << " is not positive";
      throw Error(ErrorCode::TensionsDegenerate, msg.str());
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double other = g[(k + 1) % 3] + g[(k + 2) % 3];
    if (!(g[k] < other)) {
      std::ostringstream msg;
      msg << "triangle inequality fails: gamma" << k + 1 << " = " << g[k]
          << " >= " << other;
      throw Error(ErrorCode::TensionsDegenerate, msg.str());
    }
  }
}

JunctionAngles young_angles(const SurfaceTensions& tensions) {
  validate_tensions(tensions);
  const auto& g = tensions.gamma;
  JunctionAngles a;
  for (int k = 0; k < 3; ++k) {
    const double gi = g[(k + 1) % 3];
    const double gj = g[(k + 2) % 3];
    const double ck = (g[k] * g[k] - gi * gi - gj * gj) / (2.0 * gi * gj);
    a.theta[k] = std::acos(std::clamp(ck, -1.0, 1.0));
  }
  // Restore the exact sum lost to rounding in acos.
  const double excess = a.theta[0] + a.theta[1] + a.theta[2] - 2.0 * std::numbers::pi;
  const int largest = static_cast<int>(std::max_element(a.theta.begin(), a.theta.end()) - a.theta.begin());
  a.theta[largest] -= excess;
  for (int k = 0; k < 3; ++k) {
    a.c[k] = std::cos(a.theta[k]);
    a.s[k] = std::sin(a.theta[k]);
  }
  return a;
}

JunctionMatrix junction_matrix(const JunctionAngles& angles) {
  const auto& c = angles.c;
  const auto& s = angles.s;
  JunctionMatrix jm;
  jm.d = -1.0 / (1.0 - c[0] * c[1] * c[2]);
  Mat3 raw;
  raw << c[2] * c[0] * s[1], s[2], c[2] * s[0],
         c[0] * s[1], c[0] * c[1] * s[2], s[0],
         s[1], c[1] * s[2], c[1] * c[2] * s[0];
  jm.q = jm.d * raw;
  return jm;
}

double force_balance_residual(const std::array<Vec2, 3>& tangents, const SurfaceTensions& tensions) {
  Vec2 sum = Vec2::Zero();
  for (int i = 0; i < 3; ++i) sum += tensions.gamma[i] * tangents[i];
  return sum.norm();
}

std::array<Vec2, 3> junction_tangents(const JunctionAngles& angles, double phi) {
  const double a1 = phi;
  const double a2 = phi + angles.theta[2];
  const double a3 = a2 + angles.theta[0];
  return {Vec2(std::cos(a1), std::sin(a1)), Vec2(std::cos(a2), std::sin(a2)),
          Vec2(std::cos(a3), std::sin(a3))};
}

double sine_law_residual(const JunctionAngles& angles, const SurfaceTensions& tensions) {
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i) r[i] = angles.s[i] / tensions.gamma[i];
  const double mean = (r[0] + r[1] + r[2]) / 3.0;
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::abs(v - mean) / std::abs(mean));
  return worst;
}

double angle_sum_residual(const JunctionAngles& angles) {
  return std::abs(angles.theta[0] + angles.theta[1] + angles.theta[2] - 2.0 * std::numbers::pi);
}

double stick_residual(const std::array<Vec2, 3>& tangents, const Vec3& mu, const Vec3& rho0) {
  std::array<Vec2, 3> x;
  for (int i = 0; i < 3; ++i) x[i] = mu[i] * tangents[i] + rho0[i] * rot90(tangents[i]);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) worst = std::max(worst, (x[i] - x[j]).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace tjflow
