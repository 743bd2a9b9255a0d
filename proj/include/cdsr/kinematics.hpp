#pragma once

#include <vector>

#include "cdsr/model.hpp"
#include "cdsr/statics.hpp"

namespace cdsr {

/// Whole-robot configuration: slide plus coupled segment configurations,
/// ordered base to tip. All but the distal segment hold coupled values.
struct RobotConfig {
  double slide = 0.0;
  std::vector<SegmentConfig> segments;
  std::vector<SegmentStatics> statics;
};

// ---- inextensible (PCC) baseline -------------------------------------------

/// Configuration from three cable displacements with the arc length held at L.
SegmentConfig pcc_config_from_cables(const Eigen::Vector3d& q_k, double r, double L,
                                     double theta_max = std::numbers::pi / 2.0);

/// q_i = -theta r cos(phi + (i-1) 2pi/3)
Eigen::Vector3d pcc_cables_from_config(double theta, double phi, double r);

// ---- single arc -------------------------------------------------------------

/// Tip frame of a constant-curvature arc relative to its base frame.
Pose arc_transform(const SegmentConfig& config);

/// Frame at `fraction` in [0, 1] of the arc length along the same arc.
Pose arc_transform_partial(const SegmentConfig& config, double fraction);

// ---- coupled robot ----------------------------------------------------------

/// Coupled configurations from cable tensions. The distal segment bends
/// under its own cables only; each proximal segment bends under the vector
/// sum of its local moment and the moment of everything distal to it,
/// turned by the inter-segment cable offset zeta.
RobotConfig coupled_configurations(const RobotParams& params, const Tension& f,
                                   StiffnessModel model = StiffnessModel::Compressible);

RobotConfig robot_configuration(const RobotParams& params, const Actuation& q,
                                StiffnessModel model = StiffnessModel::Compressible);

/// Slide(q_0) * Arc(psi_1) * ... * Arc(psi_n).
Pose forward_kinematics(const RobotConfig& config);
Pose forward_kinematics(const RobotParams& params, const Actuation& q,
                        StiffnessModel model = StiffnessModel::Compressible);

/// Base frame of every segment followed by the tip frame (n + 1 poses).
std::vector<Pose> segment_frames(const RobotConfig& config);

/// Backbone samples from the slide base to the tip at uniform arc-length
/// spacing no larger than `spacing`; ceil(total / spacing) + 1 points.
std::vector<Eigen::Vector3d> backbone_points(const RobotConfig& config, double spacing);
std::vector<Eigen::Vector3d> backbone_points(const RobotParams& params, const Actuation& q,
                                             double spacing,
                                             StiffnessModel model = StiffnessModel::Compressible);

// ---- orientation ------------------------------------------------------------

/// Fixed-axis X-Y-Z angles (alpha about x, beta about y, gamma about z),
/// so R = Rz(gamma) Ry(beta) Rx(alpha). Radians.
Eigen::Vector3d euler_xyz(const Eigen::Matrix3d& R);
Eigen::Matrix3d rotation_from_euler_xyz(const Eigen::Vector3d& angles);

struct TipOrientation {
  Eigen::Vector3d euler_deg = Eigen::Vector3d::Zero();
  double tilt_deg = 0.0;  ///< angle between tip z-axis and world z-axis
  bool gimbal_lock = false;
};

TipOrientation tip_orientation(const Eigen::Matrix3d& R);

/// Tip orientation depends only on the cables, so only q_c is taken.
TipOrientation tip_orientation_euler(const RobotParams& params, const Eigen::VectorXd& q_c,
                                     StiffnessModel model = StiffnessModel::Compressible);

}  // namespace cdsr
