#pragma once

#include <optional>

#include "cdsr/kinematics.hpp"

namespace cdsr {

/// Finite-difference settings. Bounds default to the physical ones
/// (q_0 >= 0, q_c <= 0); supplied bounds are intersected with those.
struct DifferenceOptions {
  double step = 1e-5;
  std::optional<Eigen::VectorXd> lower;
  std::optional<Eigen::VectorXd> upper;
  StiffnessModel model = StiffnessModel::Compressible;
};

struct JacobianSet {
  Eigen::MatrixXd position;     ///< 3 x (3n+1), mm per mm; column 0 is the slide
  Eigen::MatrixXd orientation;  ///< 3 x 3n, degrees of Euler angle per mm of cable
  Eigen::VectorXd at;
};

/// Central differences of the tip position; second-order one-sided
/// differences where a central stencil would leave the bounds. The slide
/// column is exactly (0, 0, 1).
Eigen::MatrixXd position_jacobian(const RobotParams& params, const Actuation& q,
                                  const DifferenceOptions& options = {});

/// Differences of the fixed-axis X-Y-Z tip angles (degrees) with respect to
/// the cable displacements. Throws GimbalLock when beta is at +-90 deg.
Eigen::MatrixXd orientation_jacobian(const RobotParams& params, const Eigen::VectorXd& q_c,
                                     const DifferenceOptions& options = {});

JacobianSet jacobians(const RobotParams& params, const Actuation& q,
                      const DifferenceOptions& options = {});

/// Generic central/one-sided difference of a vector function of q, with the
/// same bound handling as the Jacobians above.
template <typename F>
Eigen::MatrixXd difference_jacobian(F&& fn, const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, double h);

/// Delta q = J^T (J J^T + lambda_sq I)^{-1} dx, the unique minimizer of
/// ||J dq - dx||^2 + lambda_sq ||dq||^2. Throws SingularSystem when
/// lambda_sq = 0 and J J^T is rank-deficient.
Eigen::VectorXd dls_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& dx, double lambda_sq);

/// Right pseudo-inverse J^T (J J^T)^{-1}.
Eigen::MatrixXd right_pseudo_inverse(const Eigen::MatrixXd& J);

/// I - J^+ J. Throws SingularSystem if J is not of full row rank.
Eigen::MatrixXd nullspace_projector(const Eigen::MatrixXd& J);

// ---------------------------------------------------------------------------

template <typename F>
Eigen::MatrixXd difference_jacobian(F&& fn, const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, double h) {
  Eigen::VectorXd probe = x;
  const Eigen::VectorXd f0 = fn(probe);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const bool up = x(j) + h <= upper(j);
    const bool down = x(j) - h >= lower(j);
    if (up && down) {
      probe(j) = x(j) + h;
      const Eigen::VectorXd fp = fn(probe);
      probe(j) = x(j) - h;
      const Eigen::VectorXd fm = fn(probe);
      J.col(j) = (fp - fm) / (2.0 * h);
    } else {
      const double dir = up ? 1.0 : -1.0;
      probe(j) = x(j) + dir * h;
      const Eigen::VectorXd f1 = fn(probe);
      probe(j) = x(j) + dir * 2.0 * h;
      const Eigen::VectorXd f2 = fn(probe);
      J.col(j) = dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
    }
    probe(j) = x(j);
  }
  return J;
}

}  // namespace cdsr
