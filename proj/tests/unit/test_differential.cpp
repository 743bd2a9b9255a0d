#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "cdsr/differential.hpp"

using namespace cdsr;
using cdsr::testing::uniform;

namespace {

Eigen::VectorXd tip(const RobotParams& p, const Eigen::VectorXd& q) {
  return forward_kinematics(p, Actuation(q)).p;
}

/// Central differences at h and h/2 combined to cancel the h^2 term.
Eigen::MatrixXd richardson(const RobotParams& p, const Eigen::VectorXd& q, double h) {
  auto central = [&](double step) {
    Eigen::MatrixXd J(3, q.size());
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      Eigen::VectorXd a = q, b = q;
      a(j) += step;
      b(j) -= step;
      J.col(j) = (tip(p, a) - tip(p, b)) / (2.0 * step);
    }
    return J;
  };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

Eigen::VectorXd interior_q(std::mt19937_64& rng) {
  Eigen::VectorXd q(7);
  q << uniform(rng, 1, 1.0, 30.0), uniform(rng, 6, -6.0, -0.5);
  return q;
}

}  // namespace

TEST_CASE("slide column is exact") {
  const RobotParams p = reference_robot();
  const Eigen::MatrixXd J = position_jacobian(p, Actuation::zero(2));
  CHECK(J.col(0) == Eigen::Vector3d::UnitZ());
}

TEST_CASE("straight-pose z sensitivity comes from compression only") {
  // Pulling a cable (q_c decreasing) shortens the body, so dz/dq_c > 0.
  const RobotParams p = reference_robot();
  const Eigen::MatrixXd J = position_jacobian(p, Actuation::zero(2));
  for (int j = 1; j < 7; ++j) CHECK(J(2, j) > 0.0);

  DifferenceOptions constant;
  constant.model = StiffnessModel::Constant;
  const Eigen::MatrixXd Jc = position_jacobian(p, Actuation::zero(2), constant);
  for (int j = 1; j < 7; ++j) CHECK(std::abs(Jc(2, j)) < 1e-8);
}

TEST_CASE("position jacobian matches Richardson oracle") {
  const RobotParams p = reference_robot();
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd q = interior_q(rng);
    const Eigen::MatrixXd J = position_jacobian(p, Actuation(q));
    const Eigen::MatrixXd R = richardson(p, q, 1e-3);
    CHECK((J - R).norm() <= 1e-4 * R.norm());
  }
}

TEST_CASE("central differences converge at second order") {
  const RobotParams p = reference_robot();
  std::mt19937_64 rng(31);
  const Eigen::VectorXd q = interior_q(rng);
  const Eigen::MatrixXd R = richardson(p, q, 1e-3);
  DifferenceOptions coarse, fine;
  coarse.step = 0.2;
  fine.step = 0.1;
  const double e1 = (position_jacobian(p, Actuation(q), coarse) - R).norm();
  const double e2 = (position_jacobian(p, Actuation(q), fine) - R).norm();
  CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("one-sided differences at the bound") {
  const RobotParams p = reference_robot();
  Eigen::VectorXd q(7);
  q << 0.0, -2.0, 0.0, -1.0, -0.5, 0.0, -3.0;
  const Eigen::MatrixXd J = position_jacobian(p, Actuation(q));
  CHECK(J.allFinite());
  // The one-sided stencil only probes inside the bounds; compare to a
  // Richardson oracle taken one-sidedly as well.
  for (int j : {2, 5}) {
    auto f = [&](double h) {
      Eigen::VectorXd a = q;
      a(j) -= h;
      return tip(p, a);
    };
    const double h = 1e-3;
    const Eigen::Vector3d d1 = (f(0.0) - f(h)) / h;
    const Eigen::Vector3d d2 = (f(0.0) - f(h / 2.0)) / (h / 2.0);
    const Eigen::Vector3d oracle = 2.0 * d2 - d1;
    CHECK((J.col(j) - oracle).norm() <= 1e-4 * std::max(1.0, oracle.norm()));
  }
}

TEST_CASE("orientation jacobian matches Richardson oracle") {
  const RobotParams p = reference_robot();
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd q_c = uniform(rng, 6, -6.0, -0.5);
    auto angles = [&](const Eigen::VectorXd& c) { return tip_orientation_euler(p, c).euler_deg; };
    auto central = [&](double h) {
      Eigen::MatrixXd J(3, 6);
      for (int j = 0; j < 6; ++j) {
        Eigen::VectorXd a = q_c, b = q_c;
        a(j) += h;
        b(j) -= h;
        J.col(j) = (angles(a) - angles(b)) / (2.0 * h);
      }
      return J;
    };
    const Eigen::MatrixXd R = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
    const Eigen::MatrixXd J = orientation_jacobian(p, q_c);
    CHECK((J - R).norm() <= 1e-4 * R.norm());
  }
}

TEST_CASE("jacobian set") {
  const RobotParams p = reference_robot();
  Eigen::VectorXd q(7);
  q << 3.0, -1.0, 0.0, -2.0, -0.5, -0.5, 0.0;
  const JacobianSet set = jacobians(p, Actuation(q));
  CHECK(set.position.rows() == 3);
  CHECK(set.position.cols() == 7);
  CHECK(set.orientation.cols() == 6);
  CHECK(set.at == q);
}

TEST_CASE("dls step examples") {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 7);
  J.leftCols<3>().setIdentity();
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(7);
  expected.head<3>() << 1, 2, 3;
  CHECK((dls_step(J, Eigen::Vector3d(1, 2, 3), 0.0) - expected).norm() < 1e-14);
  CHECK(dls_step(J, Eigen::Vector3d(1, 2, 3), 1e12).norm() < 1e-10);

  Eigen::MatrixXd rank_deficient = Eigen::MatrixXd::Zero(3, 7);
  rank_deficient(0, 0) = 1.0;
  CHECK_THROWS_AS(dls_step(rank_deficient, Eigen::Vector3d(1, 0, 0), 0.0), Error);
}

TEST_CASE("dls step solves the normal equations and is optimal") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd J = Eigen::Map<Eigen::MatrixXd>(uniform(rng, 21, -2.0, 2.0).data(), 3, 7);
    const Eigen::VectorXd dx = uniform(rng, 3, -1.0, 1.0);
    const double lambda2 = uniform(rng, 1, 1e-3, 1.0)(0);
    const Eigen::VectorXd dq = dls_step(J, dx, lambda2);
    const Eigen::MatrixXd N = J.transpose() * J + lambda2 * Eigen::MatrixXd::Identity(7, 7);
    const Eigen::VectorXd oracle = N.ldlt().solve(J.transpose() * dx);
    CHECK((dq - oracle).norm() <= 1e-8 * std::max(1.0, oracle.norm()));

    auto objective = [&](const Eigen::VectorXd& v) {
      return (J * v - dx).squaredNorm() + lambda2 * v.squaredNorm();
    };
    const double best = objective(dq);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd dir = uniform(rng, 7, -1.0, 1.0).normalized();
      CHECK(objective(dq + 1e-6 * dir) >= best);
      CHECK(objective(dq - 1e-6 * dir) >= best);
    }
  }
}

TEST_CASE("nullspace projector") {
  const Eigen::MatrixXd square = Eigen::Matrix3d::Random() + 3.0 * Eigen::Matrix3d::Identity();
  CHECK(nullspace_projector(square).norm() < 1e-12);

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd J = Eigen::Map<Eigen::MatrixXd>(uniform(rng, 21, -2.0, 2.0).data(), 3, 7);
    const Eigen::MatrixXd P = nullspace_projector(J);
    CHECK((J * P).norm() <= 1e-9);
    CHECK((P * P - P).norm() <= 1e-9);

    const Eigen::VectorXd xdot = uniform(rng, 3, -1.0, 1.0);
    const Eigen::VectorXd qdot_n = uniform(rng, 7, -1.0, 1.0);
    const Eigen::VectorXd qdot = right_pseudo_inverse(J) * xdot + P * qdot_n;
    CHECK((J * qdot - xdot).norm() <= 1e-9);
  }

  Eigen::MatrixXd deficient = Eigen::MatrixXd::Zero(3, 7);
  deficient(0, 1) = 1.0;
  CHECK_THROWS_AS(nullspace_projector(deficient), Error);
}
