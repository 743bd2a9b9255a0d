#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace cdsr::detail {

/// Maps an angle to [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= std::numbers::pi;
  return w >= std::numbers::pi ? w - kTwoPi : w;
}

inline Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

inline Eigen::Matrix3d rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

inline Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

/// Rot(z, phi) * Rot(y, theta) * Rot(z, -phi)
inline Eigen::Matrix3d arc_rotation(double theta, double phi) {
  return rot_z(phi) * rot_y(theta) * rot_z(-phi);
}

}  // namespace cdsr::detail
