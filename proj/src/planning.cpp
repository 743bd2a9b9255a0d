#include "cdsr/planning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rotation.hpp"

namespace cdsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bounds {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

Bounds feasible_bounds(const SolverSettings& s, Eigen::Index size) {
  Bounds b{Eigen::VectorXd::Constant(size, -kInf), Eigen::VectorXd::Zero(size)};
  b.lo(0) = 0.0;
  b.hi(0) = kInf;
  b.lo = b.lo.cwiseMax(s.q_min);
  b.hi = b.hi.cwiseMin(s.q_max);
  return b;
}

Eigen::VectorXd clamp(const Eigen::VectorXd& q, const Bounds& b) {
  return q.cwiseMax(b.lo).cwiseMin(b.hi);
}

Eigen::VectorXd cable_damping(Eigen::Index size, double lambda2) {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(size, lambda2);
  d(0) = 0.0;
  return d;
}

/// Damped least squares under A dq <= b and the bounds on q + dq, optionally
/// inside the box |dq_i| <= radius.
Eigen::VectorXd constrained_least_squares(const Actuation& q, const Eigen::MatrixXd& M,
                                          const Eigen::VectorXd& y,
                                          const Eigen::VectorXd& damping,
                                          const SolverSettings& s, const StepJacobians& jac,
                                          double radius = kInf) {
  if (!y.allFinite() || !M.allFinite()) {
    throw Error(ErrorCode::QPFailure, "step problem has non-finite entries");
  }
  const Bounds b = feasible_bounds(s, q.size());
  QuadraticProgram qp = least_squares_program(M, y, damping);
  add_inequalities(qp, s.A, s.b);
  Eigen::VectorXd lo = b.lo - q.vector();
  Eigen::VectorXd hi = b.hi - q.vector();
  if (std::isfinite(radius)) {
    lo = lo.cwiseMax(Eigen::VectorXd::Constant(lo.size(), -radius));
    hi = hi.cwiseMin(Eigen::VectorXd::Constant(hi.size(), radius));
  }
  add_box(qp, lo, hi);
  if (jac.bend_rows.rows() > 0) add_inequalities(qp, jac.bend_rows, jac.bend_slack);
  return solve_qp(qp).x;
}

Eigen::Vector3d wrapped_difference_deg(const Eigen::Vector3d& desired,
                                       const Eigen::Vector3d& actual) {
  constexpr double kDeg = 180.0 / std::numbers::pi;
  Eigen::Vector3d d;
  for (int i = 0; i < 3; ++i) d(i) = detail::wrap_angle((desired(i) - actual(i)) / kDeg) * kDeg;
  return d;
}

struct Evaluation {
  Eigen::Vector3d tip;
  Eigen::Vector3d dx;
  TipOrientation orientation;
  Eigen::Vector3d d_omega = Eigen::Vector3d::Zero();
  double G = 0.0;
};

struct Tracker {
  const RobotParams& params;
  const TrackRequest& request;
  const SolverSettings& s;
  Bounds bounds;

  Evaluation evaluate(const Eigen::VectorXd& q, const Eigen::Vector3d& target) const {
    Evaluation e;
    const Pose tip = forward_kinematics(params, Actuation(q), s.model);
    e.tip = tip.p;
    e.dx = target - tip.p;
    e.orientation = tip_orientation(tip.R);
    if (request.mode == Mode::FixedOrientation) {
      e.d_omega = wrapped_difference_deg(request.orientation_deg, e.orientation.euler_deg);
    }
    if (!request.scene.empty()) {
      e.G = collision_indicator(params, Actuation(q), request.scene, s.spacing, s.model);
    }
    return e;
  }

  double merit(const Evaluation& e) const {
    switch (request.mode) {
      case Mode::Plain: return e.dx.norm();
      case Mode::FixedOrientation:
        return e.dx.squaredNorm() + s.orientation_weight * s.orientation_weight *
                                        e.d_omega.cwiseProduct(s.orientation_axis_weights).squaredNorm();
      case Mode::Avoid: return e.dx.squaredNorm() + s.eta * e.G * e.G;
    }
    return kInf;
  }

  bool converged(const Evaluation& e) const {
    if (e.dx.norm() > s.threshold) return false;
    if (request.mode == Mode::FixedOrientation) {
      for (int a = 0; a < 3; ++a) {
        if (s.orientation_weight * s.orientation_axis_weights(a) > 0.0 &&
            std::abs(e.d_omega(a)) > s.orientation_threshold_deg) {
          return false;
        }
      }
    }
    if (request.mode == Mode::Avoid && !(e.G < std::min(1.0, s.clearance_target))) return false;
    return true;
  }

  Eigen::VectorXd step(const Actuation& q, const Evaluation& e,
                       const Eigen::Vector3d& target) const {
    DifferenceOptions opt;
    opt.step = s.jacobian_step;
    opt.lower = bounds.lo;
    opt.upper = bounds.hi;
    opt.model = s.model;
    StepJacobians jac;
    jac.position = position_jacobian(params, q, opt);
    add_bend_limits(params, q, s, jac);
    switch (request.mode) {
      case Mode::Plain: return solve_step_plain(q, e.dx, s, jac);
      case Mode::FixedOrientation:
        jac.orientation = orientation_jacobian(params, q.cables(), opt);
        return solve_step_fixed_orientation(q, e.dx, e.d_omega, s, jac);
      case Mode::Avoid:
        return solve_step_collision(params, q, target, request.scene, s, jac);
    }
    return Eigen::VectorXd::Zero(q.size());
  }
};

double collision_objective(const RobotParams& p, const Actuation& q, const Eigen::Vector3d& target,
                           const Scene& scene, const SolverSettings& s, const Eigen::VectorXd& dq) {
  const Actuation moved(q.vector() + dq);
  const Eigen::Vector3d tip = forward_kinematics(p, moved, s.model).p;
  const double G = collision_indicator(p, moved, scene, s.spacing, s.model);
  return (target - tip).squaredNorm() + s.eta * G * G +
         s.lambda2 * dq.tail(dq.size() - 1).squaredNorm();
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Plain: return "plain";
    case Mode::FixedOrientation: return "fixed-orientation";
    case Mode::Avoid: return "avoid";
  }
  return "unknown";
}

Mode mode_from_string(std::string_view text) {
  if (text == "plain") return Mode::Plain;
  if (text == "fixed-orientation") return Mode::FixedOrientation;
  if (text == "avoid") return Mode::Avoid;
  throw Error(ErrorCode::ValidationError,
              "mode must be plain, fixed-orientation or avoid, got '" + std::string(text) + "'");
}

std::string_view to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::Ok: return "ok";
    case NodeStatus::Inexact: return "inexact";
    case NodeStatus::Failed: return "failed";
    case NodeStatus::Skipped: return "skipped";
  }
  return "unknown";
}

NodeStatus node_status_from_string(std::string_view text) {
  if (text == "ok") return NodeStatus::Ok;
  if (text == "inexact") return NodeStatus::Inexact;
  if (text == "failed") return NodeStatus::Failed;
  if (text == "skipped") return NodeStatus::Skipped;
  throw Error(ErrorCode::ValidationError, "unknown node status '" + std::string(text) + "'");
}

SolverSettings default_settings(int segments) {
  if (segments < 1) throw Error(ErrorCode::ValidationError, "segments must be >= 1");
  const int size = 3 * segments + 1;
  SolverSettings s;
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(size);
  diag(0) = 1e-3;
  s.A = diag.asDiagonal();
  s.b = Eigen::VectorXd::Constant(size, 0.01);
  s.q_min = Eigen::VectorXd::Constant(size, -2.0);
  s.q_min(0) = 0.0;
  s.q_max = Eigen::VectorXd::Zero(size);
  s.q_max(0) = 60.0;
  s.dq_init.resize(size);
  s.dq_init(0) = -0.01;
  for (int i = 1; i < size; ++i) s.dq_init(i) = (i % 2 == 1) ? 1.0 : 2.0;
  s.dq_init *= -1e-2;
  return s;
}

void validate_settings(const SolverSettings& s, int segments) {
  const Eigen::Index size = 3 * segments + 1;
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::ValidationError, "solver." + field + ": " + why);
  };
  if (!(s.lambda2 > 0.0)) fail("lambda2", "must be > 0");
  if (!(s.eta >= 0.0)) fail("eta", "must be >= 0");
  if (s.A.rows() < 1 || s.A.cols() != size) fail("A", "needs " + std::to_string(size) + " columns");
  if (s.b.size() != s.A.rows()) fail("b", "size must match the rows of A");
  if (s.q_min.size() != size) fail("q_min", "needs " + std::to_string(size) + " entries");
  if (s.q_max.size() != size) fail("q_max", "needs " + std::to_string(size) + " entries");
  if (s.dq_init.size() != size) fail("dq_init", "needs " + std::to_string(size) + " entries");
  if ((s.q_min.array() > s.q_max.array()).any()) fail("q_min", "must not exceed q_max");
  if (!s.A.allFinite() || !s.b.allFinite() || !s.dq_init.allFinite()) {
    fail("A", "A, b and dq_init must be finite");
  }
  if (!(s.threshold > 0.0)) fail("threshold", "must be > 0");
  if (s.max_inner_iters < 0) fail("max_inner_iters", "must be >= 0");
  if (s.median_window < 1 || s.median_window % 2 == 0) fail("median_window", "must be odd and >= 1");
  if (!(s.spacing > 0.0)) fail("spacing", "must be > 0");
  if (!(s.orientation_weight >= 0.0)) fail("orientation_weight", "must be >= 0");
  if (!(s.orientation_axis_weights.array() >= 0.0).all()) {
    fail("orientation_axis_weights", "must be >= 0");
  }
  if (!(s.orientation_threshold_deg > 0.0)) fail("orientation_threshold_deg", "must be > 0");
  if (!(s.failure_tolerance >= s.threshold)) fail("failure_tolerance", "must be >= threshold");
  if (!(s.clearance_target > 0.0)) fail("clearance_target", "must be > 0");
  if (!(s.bend_window >= 0.0)) fail("bend_window", "must be >= 0");
  if (!(s.bend_margin >= 0.0)) fail("bend_margin", "must be >= 0");
  if (!(s.jacobian_step > 0.0)) fail("jacobian_step", "must be > 0");
  if (!(s.collision_step > 0.0)) fail("collision_step", "must be > 0");
  if (s.max_halvings < 0) fail("max_halvings", "must be >= 0");
  if (s.trust_region_passes < 1) fail("trust_region_passes", "must be >= 1");
  if (!(s.abort_fraction >= 0.0 && s.abort_fraction <= 1.0)) fail("abort_fraction", "must be in [0, 1]");
  const Bounds b = feasible_bounds(s, size);
  if ((b.lo.array() > b.hi.array()).any()) {
    fail("q_min", "bounds leave no room inside q_0 >= 0, q_c <= 0");
  }
}

Eigen::VectorXd solve_step_plain(const Actuation& q, const Eigen::Vector3d& dx,
                                 const SolverSettings& s, const StepJacobians& jac) {
  const Eigen::VectorXd damping = s.plain_damps_slide
                                      ? Eigen::VectorXd::Constant(q.size(), s.lambda2)
                                      : cable_damping(q.size(), s.lambda2);
  return constrained_least_squares(q, jac.position, dx, damping, s, jac);
}

Eigen::VectorXd solve_step_fixed_orientation(const Actuation& q, const Eigen::Vector3d& dx,
                                             const Eigen::Vector3d& d_omega_deg,
                                             const SolverSettings& s, const StepJacobians& jac) {
  const Eigen::Index size = q.size();
  if (jac.orientation.rows() != 3 || jac.orientation.cols() != size - 1) {
    throw Error(ErrorCode::IndexOutOfRange, "orientation Jacobian has the wrong shape");
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(6, size);
  M.topRows(3) = jac.position;
  const Eigen::Vector3d w = s.orientation_weight * s.orientation_axis_weights;
  M.bottomRightCorner(3, size - 1) = w.asDiagonal() * jac.orientation;
  Eigen::VectorXd y(6);
  y << dx, w.cwiseProduct(d_omega_deg);
  return constrained_least_squares(q, M, y, cable_damping(size, s.lambda2), s, jac);
}

void add_bend_limits(const RobotParams& p, const Actuation& q, const SolverSettings& s,
                     StepJacobians& jac) {
  auto bends = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const RobotConfig rc = robot_configuration(p, Actuation(x), s.model);
    Eigen::VectorXd theta(p.n);
    for (int k = 0; k < p.n; ++k) theta(k) = rc.segments[k].theta;
    return theta;
  };
  const Eigen::VectorXd theta = bends(q.vector());
  std::vector<int> near;
  for (int k = 0; k < p.n; ++k) {
    if (theta(k) >= p.theta_max - s.bend_window) near.push_back(k);
  }
  if (near.empty()) return;
  const Bounds b = feasible_bounds(s, q.size());
  Eigen::MatrixXd J;
  try {
    J = difference_jacobian(bends, q.vector(), b.lo, b.hi, s.jacobian_step);
  } catch (const Error&) {
    return;
  }
  jac.bend_rows.resize(static_cast<Eigen::Index>(near.size()), q.size());
  jac.bend_slack.resize(static_cast<Eigen::Index>(near.size()));
  for (std::size_t i = 0; i < near.size(); ++i) {
    const int k = near[i];
    const auto row = static_cast<Eigen::Index>(i);
    jac.bend_rows.row(row) = J.row(k);
    jac.bend_slack(row) = std::max(p.theta_max - s.bend_margin - theta(k), 0.0);
  }
}

Eigen::RowVectorXd collision_gradient(const RobotParams& p, const Actuation& q, const Scene& scene,
                                      const SolverSettings& s) {
  const Bounds b = feasible_bounds(s, q.size());
  auto G = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, collision_indicator(p, Actuation(x), scene, s.spacing, s.model));
  };
  return difference_jacobian(G, q.vector(), b.lo, b.hi, s.collision_step);
}

Eigen::VectorXd solve_step_collision(const RobotParams& p, const Actuation& q,
                                     const Eigen::Vector3d& target, const Scene& scene,
                                     const SolverSettings& s, const StepJacobians& jac) {
  const Eigen::Index size = q.size();
  const Eigen::VectorXd damping = cable_damping(size, s.lambda2);
  const Eigen::Vector3d dx = target - forward_kinematics(p, q, s.model).p;
  if (s.eta == 0.0 || scene.empty()) {
    return constrained_least_squares(q, jac.position, dx, damping, s, jac);
  }

  const double G0 = collision_indicator(p, q, scene, s.spacing, s.model);
  const Eigen::RowVectorXd grad = collision_gradient(p, q, scene, s);
  const double w = std::sqrt(s.eta);
  Eigen::MatrixXd M(4, size);
  M.topRows(3) = jac.position;
  M.row(3) = w * grad;
  Eigen::VectorXd y(4);
  y << dx, -w * G0;

  const double base = dx.squaredNorm() + s.eta * G0 * G0;
  double radius = kInf;
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(size);
  for (int pass = 0; pass < s.trust_region_passes; ++pass) {
    candidate = constrained_least_squares(q, M, y, damping, s, jac, radius);
    double value = kInf;
    try {
      value = collision_objective(p, q, target, scene, s, candidate);
    } catch (const Error&) {
      value = kInf;
    }
    if (value < base) return candidate;
    radius = 0.5 * candidate.cwiseAbs().maxCoeff();
    if (!(radius > 0.0)) break;
  }

  double G_candidate = kInf;
  try {
    G_candidate = collision_indicator(p, Actuation(q.vector() + candidate), scene, s.spacing, s.model);
  } catch (const Error&) {
    G_candidate = kInf;
  }
  if (G_candidate < 1.0) return candidate;
  std::ostringstream os;
  os << "no bounded step reduces the objective while clearing the obstacle (G = " << G_candidate
     << ")";
  throw Error(ErrorCode::CollisionUnavoidable, os.str());
}

int PlanResult::failures() const {
  return static_cast<int>(std::count(status.begin(), status.end(), NodeStatus::Failed));
}

PlanResult track_path(const RobotParams& params, const TrackRequest& request,
                      const SolverSettings& s) {
  validate_params(params);
  validate_settings(s, params.n);
  validate_scene(request.scene);
  if (request.path.cols() != 3 || request.path.rows() < 1 || !request.path.allFinite()) {
    throw Error(ErrorCode::ValidationError, "path must be a finite N x 3 matrix with N >= 1");
  }
  const Eigen::Index size = params.actuation_size();
  const Eigen::Index N = request.path.rows();

  Tracker tracker{params, request, s, feasible_bounds(s, size)};
  Eigen::VectorXd q = Eigen::VectorXd::Zero(size);
  if (request.initial_q) {
    if (request.initial_q->size() != size) {
      throw Error(ErrorCode::ValidationError, "initial_q has the wrong size");
    }
    q = *request.initial_q;
  }
  q = clamp(q, tracker.bounds);

  PlanResult out;
  out.schedule.resize(N, size);
  out.tip_trace.resize(N, 3);
  out.error_trace.resize(N);
  out.orientation_trace.resize(N, 3);
  out.tilt_trace.resize(N);
  out.g_trace.resize(N);
  out.iters.assign(N, 0);
  out.status.assign(N, NodeStatus::Skipped);
  out.reasons.assign(N, "");

  bool first_solve = true;
  int failures = 0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::Vector3d target = request.path.row(i).transpose();
    Evaluation e;
    int it = 0;
    NodeStatus status = NodeStatus::Ok;
    std::string reason;

    if (out.aborted) {
      status = NodeStatus::Skipped;
      reason = "run aborted";
      e = tracker.evaluate(q, target);
    } else {
      try {
        e = tracker.evaluate(q, target);
        while (!tracker.converged(e) && it < s.max_inner_iters) {
          if (first_solve) {
            first_solve = false;
            q = clamp(q + s.dq_init, tracker.bounds);
            e = tracker.evaluate(q, target);
            continue;
          }
          Eigen::VectorXd dq = tracker.step(Actuation(q), e, target);
          const double current = tracker.merit(e);
          bool accepted = false;
          for (int h = 0; h <= s.max_halvings; ++h, dq *= 0.5) {
            const Eigen::VectorXd candidate = clamp(q + dq, tracker.bounds);
            Evaluation ec;
            try {
              ec = tracker.evaluate(candidate, target);
            } catch (const Error&) {
              continue;
            }
            if (tracker.merit(ec) < current) {
              q = candidate;
              e = ec;
              accepted = true;
              break;
            }
          }
          if (!accepted) break;
          ++it;
        }
        const double err = e.dx.norm();
        if (request.mode == Mode::Avoid && !(e.G < 1.0)) {
          status = NodeStatus::Failed;
          std::ostringstream os;
          os << "backbone in collision (G = " << e.G << ")";
          reason = os.str();
        } else if (err <= s.threshold) {
          status = NodeStatus::Ok;
        } else if (err <= s.failure_tolerance) {
          status = NodeStatus::Inexact;
        } else {
          status = NodeStatus::Failed;
          std::ostringstream os;
          os << "tip error " << err << " mm above failure tolerance " << s.failure_tolerance;
          reason = os.str();
        }
      } catch (const Error& ex) {
        status = NodeStatus::Failed;
        reason = std::string(ex.tag()) + ": " + ex.what();
        e = tracker.evaluate(q, target);
      }
    }

    out.schedule.row(i) = q.transpose();
    out.tip_trace.row(i) = e.tip.transpose();
    out.error_trace(i) = e.dx.norm();
    out.orientation_trace.row(i) = e.orientation.euler_deg.transpose();
    out.tilt_trace(i) = e.orientation.tilt_deg;
    out.g_trace(i) = e.G;
    out.iters[i] = it;
    out.status[i] = status;
    out.reasons[i] = reason;

    if (status == NodeStatus::Failed) ++failures;
    if (!out.aborted && failures > s.abort_fraction * static_cast<double>(N)) out.aborted = true;
  }
  out.smoothed_schedule = smooth_schedule(out.schedule, s.median_window);
  return out;
}

Eigen::MatrixXd smooth_schedule(const Eigen::MatrixXd& schedule, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::EvenWindow,
                "median window must be odd and positive, got " + std::to_string(window));
  }
  const Eigen::Index rows = schedule.rows();
  const int half = window / 2;
  Eigen::MatrixXd out(rows, schedule.cols());
  std::vector<double> buf(window);
  for (Eigen::Index c = 0; c < schedule.cols(); ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int k = -half; k <= half; ++k) {
        const Eigen::Index src = std::clamp<Eigen::Index>(r + k, 0, rows - 1);
        buf[k + half] = schedule(src, c);
      }
      std::nth_element(buf.begin(), buf.begin() + half, buf.end());
      out(r, c) = buf[half];
    }
  }
  return out;
}

ModelComparison compare_stiffness_models(const RobotParams& p, const Actuation& q) {
  ModelComparison c;
  c.tip_variable = forward_kinematics(p, q, StiffnessModel::Compressible).p;
  c.tip_constant = forward_kinematics(p, q, StiffnessModel::Constant).p;
  c.deviation = (c.tip_variable - c.tip_constant).norm();
  return c;
}

ModelComparison compare_stiffness_models(const RobotParams& p, const Tension& f) {
  return compare_stiffness_models(p, Actuation(0.0, displacement_from_tension(f, p.mu)));
}

}  // namespace cdsr
