#include "cdsr/model.hpp"

#include <cmath>
#include <sstream>

namespace cdsr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::PositiveDisplacement: return "PositiveDisplacement";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OverCompression: return "OverCompression";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::WallCollapse: return "WallCollapse";
    case ErrorCode::UndefinedDirection: return "UndefinedDirection";
    case ErrorCode::BendLimitExceeded: return "BendLimitExceeded";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::GimbalLock: return "GimbalLock";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::QPFailure: return "QPFailure";
    case ErrorCode::CollisionUnavoidable: return "CollisionUnavoidable";
    case ErrorCode::CentroidOnBackbone: return "CentroidOnBackbone";
    case ErrorCode::EvenWindow: return "EvenWindow";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Aborted: return "Aborted";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid robot parameters:";
  for (const auto& s : v) os << " [" << s << "]";
  return os.str();
}

}  // namespace

InvalidParams::InvalidParams(std::vector<std::string> violations)
    : Error(ErrorCode::InvalidParams, join_violations(violations)),
      violations_(std::move(violations)) {}

RobotParams reference_robot() {
  RobotParams p;
  p.n = 2;
  p.L = 50.0;
  p.E = 0.8;
  p.nu = 0.45;
  p.zeta = std::numbers::pi;
  p.mu = 18.0;
  // Stand-in radii.
  p.r_o = 4.0;
  p.r_i = 2.0;
  p.r = 3.0;
  p.R_sr = p.r_o;
  p.theta_max = std::numbers::pi / 2.0;
  return p;
}

void validate_params(const RobotParams& p) {
  std::vector<std::string> v;
  auto check = [&](bool ok, const char* msg) {
    if (!ok) v.emplace_back(msg);
  };
  // Comparisons are written so NaN fails them.
  check(p.n >= 1, "n >= 1");
  check(p.L > 0.0, "L > 0");
  check(p.r_i > 0.0, "r_i > 0");
  check(p.r_o > p.r_i, "r_o > r_i");
  check(p.r > 0.0 && p.r < p.r_o, "0 < r < r_o");
  check(p.E > 0.0, "E > 0");
  check(p.nu >= 0.0 && p.nu < 0.5, "0 <= nu < 0.5");
  check(p.mu > 0.0, "mu > 0");
  check(p.R_sr > 0.0, "R_sr > 0");
  check(p.theta_max > 0.0 && p.theta_max <= std::numbers::pi, "0 < theta_max <= pi");
  check(std::isfinite(p.zeta), "zeta finite");
  if (!v.empty()) throw InvalidParams(std::move(v));
}

Actuation::Actuation(double slide, const Eigen::VectorXd& cables) : q_(cables.size() + 1) {
  q_(0) = slide;
  q_.tail(cables.size()) = cables;
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  T.topLeftCorner<3, 3>() = R;
  T.topRightCorner<3, 1>() = p;
  return T;
}

bool Pose::is_valid(double tol) const {
  const double ortho = (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol && p.allFinite();
}

Tension tension_from_displacement(const Eigen::VectorXd& q_c, double mu) {
  for (Eigen::Index i = 0; i < q_c.size(); ++i) {
    if (!(q_c(i) <= kDisplacementTolerance)) {
      std::ostringstream os;
      os << "cable " << i << " displacement " << q_c(i) << " mm is positive";
      throw Error(ErrorCode::PositiveDisplacement, os.str());
    }
  }
  return Tension{q_c / mu};
}

Eigen::VectorXd displacement_from_tension(const Tension& f, double mu) { return f.f * mu; }

}  // namespace cdsr
