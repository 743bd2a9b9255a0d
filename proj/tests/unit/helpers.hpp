#pragma once

#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cdsr/model.hpp"

namespace cdsr::testing {

inline RobotParams robot() { return reference_robot(); }

/// Reference robot with actuation expressed directly as tension.
inline RobotParams unit_mu_robot() {
  RobotParams p = reference_robot();
  p.mu = 1.0;
  return p;
}

inline Eigen::VectorXd uniform(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// Exhaustive box-constrained QP: each variable free, at its lower or at its
/// upper bound; the best feasible pattern is the optimum.
inline Eigen::VectorXd enumerate_box(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                              const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const Eigen::Index n = H.rows();
  long patterns = 1;
  for (Eigen::Index i = 0; i < n; ++i) patterns *= 3;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (long code = 0; code < patterns; ++code) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> free;
    long c = code;
    for (Eigen::Index i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 0) free.push_back(i);
      else x(i) = c % 3 == 1 ? lo(i) : hi(i);
    }
    if (!free.empty()) {
      const Eigen::Index f = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd Hf(f, f);
      Eigen::VectorXd rhs(f);
      for (Eigen::Index a = 0; a < f; ++a) {
        rhs(a) = -g(free[a]) - H.row(free[a]).dot(x);
        for (Eigen::Index b = 0; b < f; ++b) Hf(a, b) = H(free[a], free[b]);
      }
      const Eigen::VectorXd xf = Hf.ldlt().solve(rhs);
      for (Eigen::Index a = 0; a < f; ++a) x(free[a]) = xf(a);
    }
    if (((x - lo).array() < -1e-12).any() || ((x - hi).array() > 1e-12).any()) continue;
    const double value = 0.5 * x.dot(H * x) + g.dot(x);
    if (value < best) {
      best = value;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace cdsr::testing
