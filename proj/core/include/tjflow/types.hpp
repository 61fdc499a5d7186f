#pragma once

#include <Eigen/Dense>

namespace tjflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Counterclockwise rotation by pi/2.
inline Vec2 rot90(const Vec2& v) { return {-v.y(), v.x()}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// (a, R b) in the rotated inner product notation.
inline double dot_rot(const Vec2& a, const Vec2& b) { return a.dot(rot90(b)); }

}  // namespace tjflow
