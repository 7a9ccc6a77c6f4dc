#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace tunnelnav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into [0, 2*pi).
inline double wrap_two_pi(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
  double w = wrap_two_pi(a);
  return w > kPi ? w - kTwoPi : w;
}

}  // namespace tunnelnav
