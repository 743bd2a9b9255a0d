#include "cdsr/differential.hpp"

#include <cmath>
#include <limits>

#include "rotation.hpp"

namespace cdsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

Bounds actuation_bounds(Eigen::Index size, const DifferenceOptions& opt) {
  Bounds b{Eigen::VectorXd::Constant(size, -kInf), Eigen::VectorXd::Zero(size)};
  b.lower(0) = 0.0;
  b.upper(0) = kInf;
  if (opt.lower) {
    if (opt.lower->size() != size) {
      throw Error(ErrorCode::IndexOutOfRange, "lower bound size does not match actuation");
    }
    b.lower = b.lower.cwiseMax(*opt.lower);
  }
  if (opt.upper) {
    if (opt.upper->size() != size) {
      throw Error(ErrorCode::IndexOutOfRange, "upper bound size does not match actuation");
    }
    b.upper = b.upper.cwiseMin(*opt.upper);
  }
  return b;
}

void check_rank(const Eigen::MatrixXd& J) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J * J.transpose());
  if (lu.rank() < J.rows()) {
    throw Error(ErrorCode::SingularSystem, "J J^T is rank-deficient");
  }
}

}  // namespace

Eigen::MatrixXd position_jacobian(const RobotParams& p, const Actuation& q,
                                  const DifferenceOptions& opt) {
  const Bounds b = actuation_bounds(q.size(), opt);
  auto tip = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return forward_kinematics(p, Actuation(x), opt.model).p;
  };
  Eigen::MatrixXd J = difference_jacobian(tip, q.vector(), b.lower, b.upper, opt.step);
  J.col(0) = Eigen::Vector3d::UnitZ();
  return J;
}

Eigen::MatrixXd orientation_jacobian(const RobotParams& p, const Eigen::VectorXd& q_c,
                                     const DifferenceOptions& opt) {
  Eigen::VectorXd full(q_c.size() + 1);
  full << 0.0, q_c;
  const Bounds b = actuation_bounds(full.size(), opt);

  const TipOrientation ref = tip_orientation_euler(p, q_c, opt.model);
  if (ref.gimbal_lock) {
    throw Error(ErrorCode::GimbalLock, "tip orientation is at gimbal lock (beta = +-90 deg)");
  }
  // Angles are unwrapped against the reference so differences never jump by 360.
  auto angles = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::Vector3d e = tip_orientation_euler(p, x, opt.model).euler_deg;
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
      out(i) = ref.euler_deg(i) +
               detail::wrap_angle((e(i) - ref.euler_deg(i)) * std::numbers::pi / 180.0) * 180.0 /
                   std::numbers::pi;
    }
    return out;
  };
  return difference_jacobian(angles, q_c, b.lower.tail(q_c.size()), b.upper.tail(q_c.size()),
                             opt.step);
}

JacobianSet jacobians(const RobotParams& p, const Actuation& q, const DifferenceOptions& opt) {
  return {position_jacobian(p, q, opt), orientation_jacobian(p, q.cables(), opt), q.vector()};
}

Eigen::VectorXd dls_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& dx, double lambda_sq) {
  if (J.rows() != dx.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "task vector size does not match Jacobian rows");
  }
  if (!(lambda_sq >= 0.0)) {
    throw Error(ErrorCode::ValidationError, "damping must be non-negative");
  }
  if (lambda_sq == 0.0) check_rank(J);
  Eigen::MatrixXd G = J * J.transpose();
  G.diagonal().array() += lambda_sq;
  return J.transpose() * G.ldlt().solve(dx);
}

Eigen::MatrixXd right_pseudo_inverse(const Eigen::MatrixXd& J) {
  check_rank(J);
  const Eigen::MatrixXd G = J * J.transpose();
  return J.transpose() * G.ldlt().solve(Eigen::MatrixXd::Identity(J.rows(), J.rows()));
}

Eigen::MatrixXd nullspace_projector(const Eigen::MatrixXd& J) {
  return Eigen::MatrixXd::Identity(J.cols(), J.cols()) - right_pseudo_inverse(J) * J;
}

}  // namespace cdsr
