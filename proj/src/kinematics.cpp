#include "cdsr/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rotation.hpp"

namespace cdsr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSmallTheta = 1e-6;
constexpr double kRadToDeg = 180.0 / kPi;

/// r * F_mag * (cos phi, sin phi), computed without the angle so that it
/// stays smooth through the straight configuration.
Eigen::Vector2d local_moment(const Eigen::Vector3d& f, double r) {
  return r * Eigen::Vector2d((f(1) + f(2) - 2.0 * f(0)) / 2.0, std::sqrt(3.0) * (f(1) - f(2)) / 2.0);
}

Eigen::Vector2d rotate2(const Eigen::Vector2d& v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v(0) - s * v(1), s * v(0) + c * v(1)};
}

void check_actuation(const RobotParams& p, const Actuation& q) {
  if (q.size() != p.actuation_size()) {
    std::ostringstream os;
    os << "actuation has " << q.size() << " entries, robot needs " << p.actuation_size();
    throw Error(ErrorCode::IndexOutOfRange, os.str());
  }
}

}  // namespace

SegmentConfig pcc_config_from_cables(const Eigen::Vector3d& q, double r, double L,
                                     double theta_max) {
  SegmentConfig c;
  const double norm = tension_norm(q);  // same quadratic form
  c.theta = 2.0 * norm / (3.0 * r);
  if (c.theta > theta_max) {
    std::ostringstream os;
    os << "cable displacements imply bend " << c.theta << " rad above limit " << theta_max;
    throw Error(ErrorCode::BendLimitExceeded, os.str());
  }
  c.direction_defined = norm > kDirectionEpsilon;
  c.phi = c.direction_defined
              ? detail::wrap_angle(std::atan2(3.0 * (q(1) - q(2)),
                                              std::sqrt(3.0) * (q(1) + q(2) - 2.0 * q(0))))
              : 0.0;
  c.s = L;
  c.kappa = c.theta / L;
  return c;
}

Eigen::Vector3d pcc_cables_from_config(double theta, double phi, double r) {
  Eigen::Vector3d q;
  for (int i = 0; i < 3; ++i) q(i) = -theta * r * std::cos(phi + i * 2.0 * kPi / 3.0);
  return q;
}

Pose arc_transform(const SegmentConfig& c) {
  Pose T;
  T.R = detail::arc_rotation(c.theta, c.phi);
  const double cp = std::cos(c.phi), sp = std::sin(c.phi);
  if (c.theta < kSmallTheta) {
    const double radial = c.s * c.theta / 2.0;
    T.p = {radial * cp, radial * sp, c.s * (1.0 - c.theta * c.theta / 6.0)};
  } else {
    const double half = std::sin(c.theta / 2.0);
    const double radius = c.s / c.theta;
    const double radial = radius * 2.0 * half * half;
    T.p = {radial * cp, radial * sp, radius * std::sin(c.theta)};
  }
  return T;
}

Pose arc_transform_partial(const SegmentConfig& c, double fraction) {
  SegmentConfig part = c;
  part.theta = c.theta * fraction;
  part.s = c.s * fraction;
  return arc_transform(part);
}

RobotConfig coupled_configurations(const RobotParams& p, const Tension& f, StiffnessModel model) {
  if (f.f.size() != p.cable_count()) {
    std::ostringstream os;
    os << "tension vector has " << f.f.size() << " entries, robot needs " << p.cable_count();
    throw Error(ErrorCode::IndexOutOfRange, os.str());
  }
  const int n = p.n;
  RobotConfig rc;
  rc.segments.resize(n);
  rc.statics.resize(n);
  for (int k = 0; k < n; ++k) rc.statics[k] = segment_statics(p, f, k, model);

  // Moment vector carried by segment k, including everything distal.
  Eigen::Vector2d carried = Eigen::Vector2d::Zero();
  for (int k = n - 1; k >= 0; --k) {
    const auto& st = rc.statics[k];
    Eigen::Vector2d moment = local_moment(f.segment(k), p.r);
    if (k < n - 1) moment += rotate2(carried, -p.zeta);
    carried = moment;

    SegmentConfig& c = rc.segments[k];
    const double magnitude = moment.norm();
    c.s = st.s;
    c.theta = magnitude / st.K_T;
    c.direction_defined = magnitude > p.r * kDirectionEpsilon;
    c.phi = c.direction_defined ? detail::wrap_angle(std::atan2(moment(1), moment(0))) : 0.0;
    c.kappa = c.theta / c.s;
    if (c.theta > p.theta_max) {
      std::ostringstream os;
      os << "segment " << k << " coupled bend " << c.theta << " rad exceeds limit "
         << p.theta_max;
      throw Error(ErrorCode::BendLimitExceeded, os.str());
    }
  }
  return rc;
}

RobotConfig robot_configuration(const RobotParams& p, const Actuation& q, StiffnessModel model) {
  check_actuation(p, q);
  RobotConfig rc = coupled_configurations(p, tension_from_displacement(q.cables(), p.mu), model);
  rc.slide = q.slide();
  return rc;
}

std::vector<Pose> segment_frames(const RobotConfig& rc) {
  std::vector<Pose> frames;
  frames.reserve(rc.segments.size() + 1);
  frames.push_back(Pose::translation({0.0, 0.0, rc.slide}));
  for (const auto& seg : rc.segments) frames.push_back(frames.back() * arc_transform(seg));
  return frames;
}

Pose forward_kinematics(const RobotConfig& rc) { return segment_frames(rc).back(); }

Pose forward_kinematics(const RobotParams& p, const Actuation& q, StiffnessModel model) {
  return forward_kinematics(robot_configuration(p, q, model));
}

std::vector<Eigen::Vector3d> backbone_points(const RobotConfig& rc, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::ValidationError, "backbone spacing must be > 0");
  const auto frames = segment_frames(rc);
  const double slide = std::max(rc.slide, 0.0);
  double total = slide;
  for (const auto& seg : rc.segments) total += seg.s;

  const auto intervals =
      static_cast<std::size_t>(std::max(1.0, std::ceil(total / spacing - 1e-9)));
  const double step = total / static_cast<double>(intervals);

  std::vector<Eigen::Vector3d> pts;
  pts.reserve(intervals + 1);
  pts.emplace_back(0.0, 0.0, rc.slide - slide);
  for (std::size_t j = 1; j < intervals; ++j) {
    double along = step * static_cast<double>(j);
    if (along <= slide) {
      pts.emplace_back(0.0, 0.0, rc.slide - slide + along);
      continue;
    }
    along -= slide;
    std::size_t k = 0;
    while (k + 1 < rc.segments.size() && along > rc.segments[k].s) {
      along -= rc.segments[k].s;
      ++k;
    }
    const double fraction = std::clamp(along / rc.segments[k].s, 0.0, 1.0);
    pts.push_back(frames[k].apply(arc_transform_partial(rc.segments[k], fraction).p));
  }
  pts.push_back(frames.back().p);
  return pts;
}

std::vector<Eigen::Vector3d> backbone_points(const RobotParams& p, const Actuation& q,
                                             double spacing, StiffnessModel model) {
  return backbone_points(robot_configuration(p, q, model), spacing);
}

Eigen::Vector3d euler_xyz(const Eigen::Matrix3d& R) {
  const double beta = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  return {std::atan2(R(2, 1), R(2, 2)), beta, std::atan2(R(1, 0), R(0, 0))};
}

Eigen::Matrix3d rotation_from_euler_xyz(const Eigen::Vector3d& a) {
  return detail::rot_z(a(2)) * detail::rot_y(a(1)) * detail::rot_x(a(0));
}

TipOrientation tip_orientation(const Eigen::Matrix3d& R) {
  TipOrientation o;
  o.euler_deg = euler_xyz(R) * kRadToDeg;
  o.tilt_deg = std::acos(std::clamp(R(2, 2), -1.0, 1.0)) * kRadToDeg;
  o.gimbal_lock = std::abs(std::abs(o.euler_deg(1)) - 90.0) < 1e-6;
  return o;
}

TipOrientation tip_orientation_euler(const RobotParams& p, const Eigen::VectorXd& q_c,
                                     StiffnessModel model) {
  return tip_orientation(forward_kinematics(p, Actuation(0.0, q_c), model).R);
}

}  // namespace cdsr
