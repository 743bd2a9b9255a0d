#include "cdsr/collision.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace cdsr {

namespace {

constexpr double kCentroidTolerance = 1e-9;

double point_segment_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                              const Eigen::Vector3d& x) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - x).norm();
}

}  // namespace

void validate_scene(const Scene& scene) {
  std::vector<std::string> bad;
  if (!(scene.R_sr > 0.0)) bad.push_back("R_sr must be > 0");
  for (std::size_t i = 0; i < scene.obstacles.size(); ++i) {
    const auto& o = scene.obstacles[i];
    if (!(o.radius > 0.0)) bad.push_back("obstacle " + std::to_string(i) + " radius must be > 0");
    if (!o.center.allFinite()) {
      bad.push_back("obstacle " + std::to_string(i) + " center must be finite");
    }
  }
  if (!bad.empty()) throw InvalidParams(bad);
}

double min_backbone_distance(const std::vector<Eigen::Vector3d>& pts, const Eigen::Vector3d& x) {
  if (pts.size() < 2) {
    throw Error(ErrorCode::ValidationError, "backbone needs at least two points");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    best = std::min(best, point_segment_distance(pts[j], pts[j + 1], x));
  }
  return best;
}

double collision_indicator(const std::vector<Eigen::Vector3d>& backbone, const Scene& scene) {
  double G = 0.0;
  for (const auto& o : scene.obstacles) {
    const double d = min_backbone_distance(backbone, o.center);
    if (d < kCentroidTolerance) {
      std::ostringstream os;
      os << "obstacle centroid (" << o.center.transpose() << ") lies on the backbone";
      throw Error(ErrorCode::CentroidOnBackbone, os.str());
    }
    G = std::max(G, (o.radius + scene.R_sr) / d);
  }
  return G;
}

double collision_indicator(const RobotParams& p, const Actuation& q, const Scene& scene,
                           double spacing, StiffnessModel model) {
  if (scene.empty()) return 0.0;
  return collision_indicator(backbone_points(p, q, spacing, model), scene);
}

Contact classify(double G) {
  if (std::abs(G - 1.0) <= kCriticalTolerance) return Contact::Critical;
  return G > 1.0 ? Contact::Collision : Contact::Clear;
}

std::string_view to_string(Contact c) {
  switch (c) {
    case Contact::Collision: return "collision";
    case Contact::Critical: return "critical";
    case Contact::Clear: return "clear";
  }
  return "unknown";
}

}  // namespace cdsr
