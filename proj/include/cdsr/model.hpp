#pragma once

#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

/// Compressible-curvature kinematics and constrained motion planning for
/// multi-segment cable-driven soft robots.
///
/// Units are fixed across the library: mm, N, rad, MPa (N/mm^2). Files and
/// printed output use degrees for angles; everything in memory is radians.
namespace cdsr {

/// Machine-readable error tags. The CLI prints these on stderr.
enum class ErrorCode {
  InvalidParams,
  PositiveDisplacement,
  IndexOutOfRange,
  OverCompression,
  NoConvergence,
  WallCollapse,
  UndefinedDirection,
  BendLimitExceeded,
  QuadratureFailure,
  SingularSystem,
  GimbalLock,
  Infeasible,
  QPFailure,
  CollisionUnavoidable,
  CentroidOnBackbone,
  EvenWindow,
  UnknownKind,
  ParseError,
  ValidationError,
  IoError,
  Aborted,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  std::string_view tag() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

class InvalidParams : public Error {
 public:
  explicit InvalidParams(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Geometry and material constants of a serial robot of `n` equal-length
/// segments, three cables each, mounted on a vertical linear slide.
///
/// The radii have no defaults: they must come from the robot description.
struct RobotParams {
  int n = 2;
  double L = 50.0;      ///< undeformed segment length, mm
  double r = std::numeric_limits<double>::quiet_NaN();    ///< cable pitch radius, mm
  double r_o = std::numeric_limits<double>::quiet_NaN();  ///< outer body radius, mm
  double r_i = std::numeric_limits<double>::quiet_NaN();  ///< inner body radius, mm
  double E = 0.8;       ///< Young's modulus, MPa
  double nu = 0.45;     ///< Poisson's ratio
  double zeta = std::numbers::pi;  ///< cable angular offset between adjacent segments, rad
  double mu = 18.0;     ///< cable displacement per unit tension, mm/N
  double R_sr = std::numeric_limits<double>::quiet_NaN();  ///< cylindrical body radius for collision, mm
  double theta_max = std::numbers::pi / 2.0;  ///< per-segment bending limit, rad

  int cable_count() const noexcept { return 3 * n; }
  int actuation_size() const noexcept { return 3 * n + 1; }
};

/// Two-segment prototype: E, nu, L, zeta and mu as published. The radii
/// (r_o = 4, r_i = 2, r = 3 mm, and R_sr = r_o) are stand-ins; the prototype's values were
/// never given numerically.
RobotParams reference_robot();

/// Returns normally iff every RobotParams invariant holds; otherwise throws
/// InvalidParams listing all violated invariants.
void validate_params(const RobotParams& params);

/// Which stiffness law drives the statics. `Constant` is the inextensible
/// baseline: s_k = L and K_T = K_b / L with undeformed radii.
enum class StiffnessModel { Compressible, Constant };

/// Configuration of one segment. `s` is the compressed arc length.
struct SegmentConfig {
  double theta = 0.0;
  double phi = 0.0;
  double kappa = 0.0;
  double s = 0.0;
  /// False when no net bending moment acts (phi reported as 0).
  bool direction_defined = true;
};

/// Cable tensions, three per segment, segment-major. Tension is negative.
struct Tension {
  Eigen::VectorXd f;

  int segment_count() const { return static_cast<int>(f.size() / 3); }
  Eigen::Vector3d segment(int k) const { return f.segment<3>(3 * k); }
};

/// Actuator-space vector [q_0, q_{1,1}, q_{1,2}, q_{1,3}, q_{2,1}, ...].
/// q_0 is the slide displacement; cable displacements are <= 0 under tension.
class Actuation {
 public:
  Actuation() = default;
  explicit Actuation(Eigen::VectorXd q) : q_(std::move(q)) {}
  Actuation(double slide, const Eigen::VectorXd& cables);

  static Actuation zero(int segments) {
    return Actuation(Eigen::VectorXd::Zero(3 * segments + 1));
  }

  double slide() const { return q_(0); }
  Eigen::VectorXd cables() const { return q_.tail(q_.size() - 1); }
  const Eigen::VectorXd& vector() const noexcept { return q_; }
  Eigen::Index size() const noexcept { return q_.size(); }
  int segment_count() const { return static_cast<int>((q_.size() - 1) / 3); }

 private:
  Eigen::VectorXd q_;
};

/// Rigid transform; position in mm.
struct Pose {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d p = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }
  static Pose translation(const Eigen::Vector3d& p) { return {Eigen::Matrix3d::Identity(), p}; }

  Pose operator*(const Pose& rhs) const { return {R * rhs.R, R * rhs.p + p}; }
  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return R * x + p; }
  Eigen::Matrix4d matrix() const;

  /// Orthonormality and det(R) = +1 within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

/// Tolerance for treating a cable displacement as positive (slack push).
inline constexpr double kDisplacementTolerance = 1e-9;

/// f = q_c / mu. Throws PositiveDisplacement if any entry exceeds 1e-9 mm.
Tension tension_from_displacement(const Eigen::VectorXd& q_c, double mu);
Eigen::VectorXd displacement_from_tension(const Tension& f, double mu);

}  // namespace cdsr
