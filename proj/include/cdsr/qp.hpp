#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cdsr/model.hpp"

namespace cdsr {

/// min 1/2 x^T H x + g^T x  subject to  C x <= d, with H positive definite.
struct QuadraticProgram {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;

  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(H * x) + g.dot(x); }
  double max_violation(const Eigen::VectorXd& x) const;
};

struct QPSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  ///< one per row of C, zero when inactive
  std::vector<int> active;
  int iterations = 0;
};

/// Dual active-set method of Goldfarb and Idnani: starts from the
/// unconstrained minimum and adds the most violated constraint until the
/// iterate is feasible. Throws Infeasible when no point satisfies C x <= d
/// and QPFailure when H is not positive definite or the iteration stalls.
QPSolution solve_qp(const QuadraticProgram& qp, double feasibility_tol = 1e-12);

/// Builder for min ||M x - y||^2 + x^T diag(damping) x under C x <= d.
/// The objective is scaled by 1/2 relative to the textbook form, which does
/// not move the minimizer.
QuadraticProgram least_squares_program(const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& damping);

/// Appends rows lo <= x <= hi (infinite entries are skipped).
void add_box(QuadraticProgram& qp, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

/// Appends rows A x <= b.
void add_inequalities(QuadraticProgram& qp, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace cdsr
