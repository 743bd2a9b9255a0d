#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdsr/collision.hpp"
#include "cdsr/differential.hpp"
#include "cdsr/qp.hpp"

namespace cdsr {

enum class Mode { Plain, FixedOrientation, Avoid };

std::string_view to_string(Mode mode);
/// Accepts "plain", "fixed-orientation" and "avoid".
Mode mode_from_string(std::string_view text);

struct SolverSettings {
  double lambda2 = 0.1;
  double eta = 0.1;
  Eigen::MatrixXd A;  ///< per-step inequality A dq <= b
  Eigen::VectorXd b;
  Eigen::VectorXd q_min;
  Eigen::VectorXd q_max;
  Eigen::VectorXd dq_init;  ///< applied once, before the first solve of a run
  double threshold = 0.1;   ///< tip-position tolerance, mm
  int max_inner_iters = 50;
  int median_window = 5;
  double spacing = 1.0;  ///< backbone sampling for collision queries, mm

  double orientation_weight = 1.0;
  /// Per-angle weights on (alpha, beta, gamma); a zero weight leaves that
  /// angle free and drops it from the convergence test.
  Eigen::Vector3d orientation_axis_weights = Eigen::Vector3d::Ones();
  double orientation_threshold_deg = 0.5;
  /// Nodes whose final error exceeds this are counted as failed, mm.
  double failure_tolerance = 1.0;
  /// Avoidance keeps iterating until G is at most this value.
  double clearance_target = 1.0;
  /// Plain mode damps the slide as well; the other modes damp cables only.
  bool plain_damps_slide = true;

  double bend_window = 0.2;    ///< rad
  double bend_margin = 0.005;  ///< rad
  double jacobian_step = 1e-5;
  double collision_step = 1e-4;
  int max_halvings = 6;
  int trust_region_passes = 5;
  double abort_fraction = 0.2;
  StiffnessModel model = StiffnessModel::Compressible;
};

/// Defaults for an n-segment robot: lambda^2 = 0.1, eta = 0.1,
/// A = diag(1e-3, 1, ...), b = 0.01, q_min = -[0, 2, ...], q_max = [60, 0, ...],
/// dq_init = -1e-2 [-0.01, 1, 2, 1, 2, ...].
SolverSettings default_settings(int segments = 2);

/// Throws ValidationError naming the first offending field.
void validate_settings(const SolverSettings& settings, int segments);

/// Jacobians at the current state; `orientation` may be empty in modes that
/// do not use it.
struct StepJacobians {
  Eigen::MatrixXd position;
  Eigen::MatrixXd orientation;
  /// Optional linearized bend-limit rows: bend_rows * dq <= bend_slack.
  Eigen::MatrixXd bend_rows;
  Eigen::VectorXd bend_slack;
};

/// Bend-limit rows for the segments whose bend is within bend_window of
/// theta_max; the slack keeps them bend_margin below the limit (or no
/// further above it than they already are).
void add_bend_limits(const RobotParams& params, const Actuation& q, const SolverSettings& settings,
                     StepJacobians& jac);

/// min ||J dq - dx||^2 + lambda^2 ||dq||^2 under A dq <= b and
/// q_min <= q + dq <= q_max. Without active constraints this is dls_step.
Eigen::VectorXd solve_step_plain(const Actuation& q, const Eigen::Vector3d& dx,
                                 const SolverSettings& settings, const StepJacobians& jac);

/// Adds ||J_ori dq_c - dOmega||^2 (degrees, scaled by orientation_weight)
/// and damps only the cables.
Eigen::VectorXd solve_step_fixed_orientation(const Actuation& q, const Eigen::Vector3d& dx,
                                             const Eigen::Vector3d& d_omega_deg,
                                             const SolverSettings& settings,
                                             const StepJacobians& jac);

/// Adds eta * G(q + dq)^2, linearized with a finite-difference gradient and
/// re-solved inside a shrinking trust region until the nonlinear objective
/// decreases. Throws CollisionUnavoidable when that fails and the best
/// candidate is still in collision.
Eigen::VectorXd solve_step_collision(const RobotParams& params, const Actuation& q,
                                     const Eigen::Vector3d& target, const Scene& scene,
                                     const SolverSettings& settings, const StepJacobians& jac);

/// Gradient of G with respect to q by finite differences (h = collision_step).
Eigen::RowVectorXd collision_gradient(const RobotParams& params, const Actuation& q,
                                      const Scene& scene, const SolverSettings& settings);

enum class NodeStatus { Ok, Inexact, Failed, Skipped };

std::string_view to_string(NodeStatus status);
NodeStatus node_status_from_string(std::string_view text);

struct PlanResult {
  Eigen::MatrixXd schedule;           ///< N x (3n+1), mm
  Eigen::MatrixXd smoothed_schedule;  ///< moving median of `schedule`
  Eigen::MatrixXd tip_trace;          ///< N x 3, mm
  Eigen::VectorXd error_trace;        ///< N, mm
  Eigen::MatrixXd orientation_trace;  ///< N x 3 X-Y-Z angles, deg
  Eigen::VectorXd tilt_trace;         ///< N, deg
  Eigen::VectorXd g_trace;            ///< N; 0 when the scene is empty
  std::vector<int> iters;
  std::vector<NodeStatus> status;
  std::vector<std::string> reasons;  ///< failure reason per node, empty if none
  bool aborted = false;

  Eigen::Index nodes() const noexcept { return schedule.rows(); }
  int failures() const;
};

struct TrackRequest {
  Eigen::MatrixXd path;  ///< N x 3 targets, mm
  Mode mode = Mode::Plain;
  Scene scene;
  Eigen::Vector3d orientation_deg = Eigen::Vector3d::Zero();  ///< desired X-Y-Z angles
  std::optional<Eigen::VectorXd> initial_q;  ///< defaults to zero actuation
};

/// Tracks every path node in order, warm-starting each from the previous
/// solution. A node that fails is recorded and the run continues; once more
/// than abort_fraction of all nodes have failed the run stops, the remaining
/// rows are marked Skipped and `aborted` is set.
PlanResult track_path(const RobotParams& params, const TrackRequest& request,
                      const SolverSettings& settings);

/// Per-column moving median with edge replication. Throws EvenWindow for
/// even (or non-positive) windows.
Eigen::MatrixXd smooth_schedule(const Eigen::MatrixXd& schedule, int window);

struct ModelComparison {
  Eigen::Vector3d tip_variable;
  Eigen::Vector3d tip_constant;
  double deviation = 0.0;
};

/// Forward kinematics with the compressible and with the constant stiffness
/// models at the same actuation.
ModelComparison compare_stiffness_models(const RobotParams& params, const Actuation& q);
ModelComparison compare_stiffness_models(const RobotParams& params, const Tension& f);

}  // namespace cdsr
