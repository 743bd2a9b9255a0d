#include "cdsr/statics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rotation.hpp"

namespace cdsr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCableSpacing = 2.0 * kPi / 3.0;

void check_segment_index(const Tension& f, int k, int n) {
  if (k < 0 || k >= n || 3 * n > f.f.size()) {
    std::ostringstream os;
    os << "segment index " << k << " outside [0, " << n << ") for " << f.f.size() << " tensions";
    throw Error(ErrorCode::IndexOutOfRange, os.str());
  }
}

}  // namespace

double cumulative_tension(const Tension& f, int k, int n) {
  check_segment_index(f, k, n);
  return f.f.segment(3 * k, 3 * (n - k)).sum();
}

RadialContraction radial_contraction(const RobotParams& p, double cumulative,
                                     const ContractionOptions& opt) {
  RadialContraction out{p.r_o, p.r_i, 0};
  if (!std::isfinite(cumulative)) {
    throw Error(ErrorCode::NoConvergence, "cumulative tension is not finite");
  }
  if (cumulative == 0.0 || p.nu == 0.0) return out;

  const double load = p.nu * cumulative / (p.E * kPi);
  // Updates below this size are round-off; stop there rather than at the
  // coarse failure tolerance.
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * p.r_o;
  bool within_tolerance = false;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double area_term = out.r_o * out.r_o - out.r_i * out.r_i;
    if (!(out.r_o > out.r_i) || !(out.r_i > 0.0) || !(area_term > 0.0)) {
      throw Error(ErrorCode::WallCollapse, "contracted wall thickness reached zero");
    }
    const double factor = 1.0 - load / area_term;
    const double next_o = (1.0 - opt.damping) * out.r_o + opt.damping * p.r_o * factor;
    const double next_i = (1.0 - opt.damping) * out.r_i + opt.damping * p.r_i * factor;
    const double step = std::max(std::abs(next_o - out.r_o), std::abs(next_i - out.r_i));
    out.r_o = next_o;
    out.r_i = next_i;
    out.iterations = it;
    if (step <= opt.tolerance) within_tolerance = true;
    if (step <= floor) break;
  }
  if (!within_tolerance) {
    std::ostringstream os;
    os << "radius fixed point did not converge in " << opt.max_iterations << " iterations";
    throw Error(ErrorCode::NoConvergence, os.str());
  }
  if (!(out.r_o > out.r_i) || !(out.r_i > 0.0)) {
    throw Error(ErrorCode::WallCollapse, "contracted wall thickness reached zero");
  }
  return out;
}

double axial_compression(const RobotParams& p, double cumulative, double area) {
  const double s = p.L * (1.0 + cumulative / (p.E * area));
  if (!(s > 0.1 * p.L)) {
    std::ostringstream os;
    os << "segment compressed to " << s << " mm (limit " << 0.1 * p.L << " mm)";
    throw Error(ErrorCode::OverCompression, os.str());
  }
  return s;
}

SegmentStatics segment_statics(const RobotParams& p, const Tension& f, int k,
                               StiffnessModel model) {
  SegmentStatics st;
  st.cumulative = cumulative_tension(f, k, p.n);
  if (model == StiffnessModel::Compressible) {
    // The radius relation does not involve s, so the radius/length pair settles in one pass.
    const auto radii = radial_contraction(p, st.cumulative);
    st.r_o = radii.r_o;
    st.r_i = radii.r_i;
    st.area = kPi * (st.r_o * st.r_o - st.r_i * st.r_i);
    st.s = axial_compression(p, st.cumulative, st.area);
  } else {
    st.r_o = p.r_o;
    st.r_i = p.r_i;
    st.area = kPi * (st.r_o * st.r_o - st.r_i * st.r_i);
    st.s = p.L;
  }
  const double r_o2 = st.r_o * st.r_o;
  const double r_i2 = st.r_i * st.r_i;
  st.K_b = p.E * kPi * (r_o2 * r_o2 - r_i2 * r_i2) / 4.0;
  st.K_T = st.K_b / st.s;
  st.K_a = p.E * st.area / p.L;
  st.F_mag = tension_norm(f.segment(k));
  st.M = p.r * st.F_mag;
  return st;
}

double tension_norm(const Eigen::Vector3d& f) {
  const double q = f.squaredNorm() - f(0) * f(1) - f(0) * f(2) - f(1) * f(2);
  return std::sqrt(std::max(q, 0.0));
}

double bend_direction(const Eigen::Vector3d& f) {
  if (tension_norm(f) <= kDirectionEpsilon) {
    throw Error(ErrorCode::UndefinedDirection, "bending direction undefined for equal tensions");
  }
  return detail::wrap_angle(
      std::atan2(3.0 * (f(1) - f(2)), std::sqrt(3.0) * (f(1) + f(2) - 2.0 * f(0))));
}

BendingMoment bending_moment(const Eigen::Vector3d& f, double r) {
  BendingMoment m;
  const double norm = tension_norm(f);
  m.tau = -r * norm;
  m.magnitude = r * norm;
  if (norm > kDirectionEpsilon) {
    const double phi = bend_direction(f);
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += f(i) * std::cos(phi + i * kCableSpacing);
    m.tau_direct = r * sum;
  }
  return m;
}

SegmentConfig segment_config_from_tension(const RobotParams& p, const Tension& f, int k,
                                          StiffnessModel model) {
  const auto st = segment_statics(p, f, k, model);
  SegmentConfig c;
  c.s = st.s;
  c.theta = st.M / st.K_T;
  if (c.theta > p.theta_max) {
    std::ostringstream os;
    os << "segment " << k << " bend " << c.theta << " rad exceeds limit " << p.theta_max;
    throw Error(ErrorCode::BendLimitExceeded, os.str());
  }
  c.direction_defined = st.F_mag > kDirectionEpsilon;
  c.phi = c.direction_defined ? bend_direction(f.segment(k)) : 0.0;
  c.kappa = c.theta / c.s;
  return c;
}

Eigen::Vector3d equilibrium_force(const SegmentConfig& c, double tension, int cable) {
  if (cable < 0 || cable > 2) {
    throw Error(ErrorCode::IndexOutOfRange, "cable index must be 0, 1 or 2");
  }
  if (tension == 0.0) return Eigen::Vector3d::Zero();
  if (!(c.theta > 0.0)) {
    throw Error(ErrorCode::QuadratureFailure, "equilibrium force needs theta > 0");
  }
  const double station = c.phi + cable * kCableSpacing;
  // The curvature factor of the distributed load cancels against d(sigma).
  const Eigen::Vector3d load(-tension * std::cos(station), -tension * std::sin(station), 0.0);

  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  constexpr double kAbsTol = 1e-10;
  Eigen::Vector3d out;
  for (int axis = 0; axis < 3; ++axis) {
    auto integrand = [&](double sigma) {
      return (detail::arc_rotation(sigma, c.phi) * load)(axis);
    };
    double error = 0.0;
    const double rel_tol = std::sqrt(std::numeric_limits<double>::epsilon());
    out(axis) = Rule::integrate(integrand, 0.0, c.theta, 15, rel_tol, &error);
    if (!std::isfinite(out(axis)) || error > std::max(kAbsTol, rel_tol * std::abs(out(axis)))) {
      throw Error(ErrorCode::QuadratureFailure, "equilibrium force quadrature did not converge");
    }
  }
  return out;
}

}  // namespace cdsr
