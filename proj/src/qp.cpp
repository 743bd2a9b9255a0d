#include "cdsr/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cdsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void append_rows(QuadraticProgram& qp, const Eigen::MatrixXd& rows, const Eigen::VectorXd& rhs) {
  const Eigen::Index m = qp.C.rows();
  const Eigen::Index n = qp.H.rows();
  Eigen::MatrixXd C(m + rows.rows(), n);
  Eigen::VectorXd d(m + rows.rows());
  if (m > 0) {
    C.topRows(m) = qp.C;
    d.head(m) = qp.d;
  }
  C.bottomRows(rows.rows()) = rows;
  d.tail(rows.rows()) = rhs;
  qp.C = std::move(C);
  qp.d = std::move(d);
}

}  // namespace

double QuadraticProgram::max_violation(const Eigen::VectorXd& x) const {
  if (C.rows() == 0) return 0.0;
  return std::max(0.0, (C * x - d).maxCoeff());
}

QuadraticProgram least_squares_program(const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& damping) {
  if (M.rows() != y.size() || M.cols() != damping.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "least-squares dimensions do not match");
  }
  QuadraticProgram qp;
  qp.H = M.transpose() * M;
  qp.H.diagonal() += damping;
  qp.g = -M.transpose() * y;
  qp.C.resize(0, M.cols());
  qp.d.resize(0);
  return qp;
}

void add_box(QuadraticProgram& qp, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const Eigen::Index n = qp.H.rows();
  if (lo.size() != n || hi.size() != n) {
    throw Error(ErrorCode::IndexOutOfRange, "box bounds do not match the variable count");
  }
  std::vector<std::pair<Eigen::Index, double>> upper, lower;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(hi(i))) upper.emplace_back(i, hi(i));
    if (std::isfinite(lo(i))) lower.emplace_back(i, lo(i));
  }
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(upper.size() + lower.size(), n);
  Eigen::VectorXd rhs(rows.rows());
  Eigen::Index r = 0;
  for (const auto& [i, v] : upper) {
    rows(r, i) = 1.0;
    rhs(r++) = v;
  }
  for (const auto& [i, v] : lower) {
    rows(r, i) = -1.0;
    rhs(r++) = -v;
  }
  append_rows(qp, rows, rhs);
}

void add_inequalities(QuadraticProgram& qp, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.cols() != qp.H.rows() || A.rows() != b.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "inequality dimensions do not match");
  }
  append_rows(qp, A, b);
}

QPSolution solve_qp(const QuadraticProgram& qp, double tol) {
  const Eigen::Index n = qp.H.rows();
  const Eigen::Index m = qp.C.rows();
  if (qp.H.cols() != n || qp.g.size() != n || qp.C.cols() != n || qp.d.size() != m) {
    throw Error(ErrorCode::IndexOutOfRange, "quadratic program dimensions do not match");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::QPFailure, "Hessian is not positive definite");
  }
  const Eigen::MatrixXd Hinv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  QPSolution sol;
  sol.x = -Hinv * qp.g;
  sol.multipliers = Eigen::VectorXd::Zero(m);
  std::vector<int>& W = sol.active;
  Eigen::VectorXd u;  // multipliers of W, in order

  // Constraints are handled as n_j^T x >= b_j with n_j = -C_j, b_j = -d_j.
  const double scale = 1.0 + (m > 0 ? qp.d.cwiseAbs().maxCoeff() : 0.0);
  const int max_iterations = static_cast<int>(10 * (n + m) + 50);

  while (true) {
    int p = -1;
    double worst = tol * scale;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (std::find(W.begin(), W.end(), static_cast<int>(j)) != W.end()) continue;
      const double v = qp.C.row(j).dot(sol.x) - qp.d(j);
      if (v > worst) {
        worst = v;
        p = static_cast<int>(j);
      }
    }
    if (p < 0) break;

    const Eigen::VectorXd np = -qp.C.row(p).transpose();
    double up = 0.0;
    while (true) {
      if (++sol.iterations > max_iterations) {
        throw Error(ErrorCode::QPFailure, "active-set iteration limit reached");
      }
      const auto k = static_cast<Eigen::Index>(W.size());
      Eigen::VectorXd z;
      Eigen::VectorXd r(k);
      if (k == 0) {
        z = Hinv * np;
      } else {
        Eigen::MatrixXd N(n, k);
        for (Eigen::Index a = 0; a < k; ++a) N.col(a) = -qp.C.row(W[a]).transpose();
        const Eigen::MatrixXd HN = Hinv * N;
        const Eigen::MatrixXd S = N.transpose() * HN;
        r = S.ldlt().solve(HN.transpose() * np);
        z = Hinv * np - HN * r;
      }

      double t1 = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (r(a) > 0.0) {
          const double ratio = u(a) / r(a);
          if (ratio < t1) {
            t1 = ratio;
            drop = a;
          }
        }
      }
      const double slack = np.dot(sol.x) + qp.d(p);  // n_p^T x - b_p, negative while violated
      const double curvature = z.dot(np);
      const double t2 =
          z.norm() > 1e-14 * np.norm() && curvature > 0.0 ? -slack / curvature : kInf;

      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        std::ostringstream os;
        os << "constraint " << p << " cannot be satisfied together with the active set";
        throw Error(ErrorCode::Infeasible, os.str());
      }
      if (!std::isfinite(t2)) {
        u -= t1 * r;
        up += t1;
        W.erase(W.begin() + drop);
        Eigen::VectorXd next(k - 1);
        for (Eigen::Index a = 0, b = 0; a < k; ++a) {
          if (a != drop) next(b++) = u(a);
        }
        u = next;
        continue;
      }
      const double t = std::min(t1, t2);
      sol.x += t * z;
      if (k > 0) u -= t * r;
      up += t;
      if (t2 <= t1) {
        W.push_back(p);
        u.conservativeResize(k + 1);
        u(k) = up;
        break;
      }
      W.erase(W.begin() + drop);
      Eigen::VectorXd next(k - 1);
      for (Eigen::Index a = 0, b = 0; a < k; ++a) {
        if (a != drop) next(b++) = u(a);
      }
      u = next;
    }
  }
  for (std::size_t a = 0; a < W.size(); ++a) sol.multipliers(W[a]) = u(static_cast<Eigen::Index>(a));
  return sol;
}

}  // namespace cdsr
