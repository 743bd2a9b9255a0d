#pragma once

#include "cdsr/model.hpp"

namespace cdsr {

/// Mechanical state of one segment under a given set of cable tensions.
struct SegmentStatics {
  double cumulative = 0.0;  ///< sum of tensions of this and all distal segments, N
  double s = 0.0;           ///< compressed length, mm
  double r_o = 0.0;         ///< outer radius after Poisson change, mm
  double r_i = 0.0;         ///< inner radius after Poisson change, mm
  double area = 0.0;        ///< cross-section area, mm^2
  double K_b = 0.0;         ///< flexural rigidity E*I, N*mm^2
  double K_T = 0.0;         ///< bending stiffness K_b / s, N*mm/rad
  double K_a = 0.0;         ///< axial stiffness E*A / L, N/mm
  double M = 0.0;           ///< local bending moment magnitude r * F_mag, N*mm
  double F_mag = 0.0;       ///< tension norm of the three local cables, N
};

/// Sum of the three local tensions over segments k..n-1 (0-based).
double cumulative_tension(const Tension& f, int k, int n);

struct RadialContraction {
  double r_o = 0.0;
  double r_i = 0.0;
  int iterations = 0;
};

/// Fixed-point options for the implicit radius relation.
struct ContractionOptions {
  double damping = 0.5;
  /// Failure criterion, mm. Iteration continues past it until updates stall
  /// so the result is a smooth function of the tension.
  double tolerance = 1e-10;
  int max_iterations = 100;
};

/// Solves r_{o,k} = r_o (1 - nu*S / (E*pi*(r_{o,k}^2 - r_{i,k}^2))) and the
/// matching inner-radius relation by damped Picard iteration, S being the
/// cumulative tension. Taken literally: tension (S < 0) grows the radii.
RadialContraction radial_contraction(const RobotParams& params, double cumulative,
                                     const ContractionOptions& options = {});

/// s = L (1 + S / (E * area)). Throws OverCompression if s <= 0.1 L.
double axial_compression(const RobotParams& params, double cumulative, double area);

/// Full statics of segment k (0-based): radii, length, stiffnesses, moment.
SegmentStatics segment_statics(const RobotParams& params, const Tension& f, int k,
                               StiffnessModel model = StiffnessModel::Compressible);

/// sqrt(f1^2 + f2^2 + f3^2 - f1 f2 - f1 f3 - f2 f3)
double tension_norm(const Eigen::Vector3d& f_k);

/// Threshold below which the bending direction is undefined.
inline constexpr double kDirectionEpsilon = 1e-12;

/// Bending direction in [-pi, pi). Pulling only cable i points the segment
/// at cable i's station, -(i-1)*2pi/3. Throws UndefinedDirection at zero norm.
double bend_direction(const Eigen::Vector3d& f_k);

struct BendingMoment {
  double tau = 0.0;         ///< signed resultant, -r * F_mag
  double magnitude = 0.0;   ///< |tau|
  double tau_direct = 0.0;  ///< r * sum_i f_i cos(phi + (i-1) 2pi/3)
};

BendingMoment bending_moment(const Eigen::Vector3d& f_k, double r);

/// Uncoupled configuration of segment k: theta = M / K_T, kappa = theta / s.
/// Throws BendLimitExceeded above theta_max.
SegmentConfig segment_config_from_tension(const RobotParams& params, const Tension& f, int k,
                                          StiffnessModel model = StiffnessModel::Compressible);

/// Resultant force that bends the segment, for cable `cable` (0-based),
/// integrated over the bend angle with an adaptive Gauss-Kronrod rule.
/// `tension` is that cable's (scalar) tension.
Eigen::Vector3d equilibrium_force(const SegmentConfig& config, double tension, int cable);

}  // namespace cdsr
