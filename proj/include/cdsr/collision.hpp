#pragma once

#include <vector>

#include "cdsr/kinematics.hpp"

namespace cdsr {

struct Sphere {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  ///< mm, world frame
  double radius = 0.0;                               ///< mm
};

/// Spherical obstacles and the robot's envelope radius.
struct Scene {
  std::vector<Sphere> obstacles;
  double R_sr = 6.5;

  bool empty() const noexcept { return obstacles.empty(); }
};

void validate_scene(const Scene& scene);

/// Minimum distance from `point` to the backbone polyline, refined exactly
/// on every edge between samples. Needs at least two points.
double min_backbone_distance(const std::vector<Eigen::Vector3d>& points,
                             const Eigen::Vector3d& point);

/// G = (R_obs + R_sr) / d_min, maximized over obstacles; 0 for an empty
/// scene. Throws CentroidOnBackbone when d_min < 1e-9 mm.
double collision_indicator(const std::vector<Eigen::Vector3d>& backbone, const Scene& scene);
double collision_indicator(const RobotParams& params, const Actuation& q, const Scene& scene,
                           double spacing = 1.0,
                           StiffnessModel model = StiffnessModel::Compressible);

enum class Contact { Collision, Critical, Clear };

inline constexpr double kCriticalTolerance = 1e-6;

/// G > 1 Collision, |G - 1| <= 1e-6 Critical, otherwise Clear.
Contact classify(double G);

std::string_view to_string(Contact contact);

}  // namespace cdsr
