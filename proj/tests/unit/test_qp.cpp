#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"

#include "cdsr/qp.hpp"

using namespace cdsr;
using cdsr::testing::enumerate_box;
using cdsr::testing::uniform;

namespace {

/// Minimum over every subset of constraints held as equalities; the optimum
/// of a strictly convex QP is the best feasible such point.
Eigen::VectorXd enumerate_active_sets(const QuadraticProgram& qp) {
  const int m = static_cast<int>(qp.C.rows());
  const Eigen::Index n = qp.H.rows();
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;
  for (long mask = 0; mask < (1L << m); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < m; ++i)
      if (mask & (1L << i)) rows.push_back(i);
    if (static_cast<Eigen::Index>(rows.size()) > n) continue;
    const Eigen::Index k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    K.topLeftCorner(n, n) = qp.H;
    rhs.head(n) = -qp.g;
    for (Eigen::Index j = 0; j < k; ++j) {
      K.block(0, n + j, n, 1) = qp.C.row(rows[j]).transpose();
      K.block(n + j, 0, 1, n) = qp.C.row(rows[j]);
      rhs(n + j) = qp.d(rows[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + k) continue;
    const Eigen::VectorXd x = lu.solve(rhs).head(n);
    if (qp.max_violation(x) > 1e-10) continue;
    const double value = qp.objective(x);
    if (value < best) {
      best = value;
      best_x = x;
    }
  }
  return best_x;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const Eigen::MatrixXd M = Eigen::Map<Eigen::MatrixXd>(uniform(rng, n * n, -1.0, 1.0).data(), n, n);
  return M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("unconstrained minimum") {
  QuadraticProgram qp;
  qp.H = Eigen::Matrix2d::Identity() * 2.0;
  qp.g = Eigen::Vector2d(-2.0, 4.0);
  qp.C.resize(0, 2);
  qp.d.resize(0);
  const QPSolution sol = solve_qp(qp);
  CHECK((sol.x - Eigen::Vector2d(1.0, -2.0)).norm() < 1e-14);
  CHECK(sol.active.empty());
}

TEST_CASE("box-constrained QP matches enumeration over 3^7 patterns") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd H = random_spd(rng, 7);
    const Eigen::VectorXd g = uniform(rng, 7, -3.0, 3.0);
    const Eigen::VectorXd lo = uniform(rng, 7, -1.0, -0.1);
    const Eigen::VectorXd hi = uniform(rng, 7, 0.1, 1.0);
    QuadraticProgram qp{H, g, Eigen::MatrixXd(0, 7), Eigen::VectorXd(0)};
    add_box(qp, lo, hi);
    const QPSolution sol = solve_qp(qp);
    const Eigen::VectorXd oracle = enumerate_box(H, g, lo, hi);
    CHECK((sol.x - oracle).norm() <= 1e-8);
  }
}

TEST_CASE("general inequalities match active-set enumeration") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd H = random_spd(rng, 4);
    QuadraticProgram qp{H, uniform(rng, 4, -3.0, 3.0), Eigen::MatrixXd(0, 4), Eigen::VectorXd(0)};
    const Eigen::MatrixXd A = Eigen::Map<Eigen::MatrixXd>(uniform(rng, 32, -1.0, 1.0).data(), 8, 4);
    add_inequalities(qp, A, uniform(rng, 8, 0.05, 1.0));
    const QPSolution sol = solve_qp(qp);
    const Eigen::VectorXd oracle = enumerate_active_sets(qp);
    CHECK((sol.x - oracle).norm() <= 1e-8);
    CHECK(qp.max_violation(sol.x) <= 1e-10);
    CHECK((sol.multipliers.array() >= -1e-12).all());
    // Stationarity: H x + g + C^T lambda = 0.
    CHECK((H * sol.x + qp.g + qp.C.transpose() * sol.multipliers).norm() <= 1e-8);
  }
}

TEST_CASE("least squares builder") {
  std::mt19937_64 rng(59);
  const Eigen::MatrixXd M = Eigen::Map<Eigen::MatrixXd>(uniform(rng, 21, -1.0, 1.0).data(), 3, 7);
  const Eigen::VectorXd y = uniform(rng, 3, -1.0, 1.0);
  const Eigen::VectorXd damping = Eigen::VectorXd::Constant(7, 0.1);
  QuadraticProgram qp = least_squares_program(M, y, damping);
  const Eigen::VectorXd x = solve_qp(qp).x;
  const Eigen::VectorXd oracle =
      (M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(7, 7)).ldlt().solve(M.transpose() * y);
  CHECK((x - oracle).norm() < 1e-10);
}

TEST_CASE("infinite bounds are skipped") {
  QuadraticProgram qp{Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), Eigen::MatrixXd(0, 2),
                      Eigen::VectorXd(0)};
  const double inf = std::numeric_limits<double>::infinity();
  add_box(qp, Eigen::Vector2d(-inf, 0.5), Eigen::Vector2d(inf, inf));
  CHECK(qp.C.rows() == 1);
  CHECK(solve_qp(qp).x(1) == doctest::Approx(0.5));
}

TEST_CASE("infeasible and indefinite programs") {
  QuadraticProgram qp{Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), Eigen::MatrixXd(0, 1),
                      Eigen::VectorXd(0)};
  add_box(qp, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0));
  try {
    solve_qp(qp);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }

  QuadraticProgram bad{-Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), Eigen::MatrixXd(0, 2),
                       Eigen::VectorXd(0)};
  try {
    solve_qp(bad);
    FAIL("expected QPFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::QPFailure);
  }
}
