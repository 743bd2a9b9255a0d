#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdsr/planning.hpp"

namespace cdsr {

enum class PathKind { Square, Eight, Oval, Circle, Polyline, Parametric };

std::string_view to_string(PathKind kind);
/// Throws UnknownKind.
PathKind path_kind_from_string(std::string_view text);

/// Lengths in mm, phases in degrees.
struct PathSpec {
  PathKind kind = PathKind::Circle;
  int nodes = 91;
  Eigen::Vector3d center = Eigen::Vector3d(0.0, 0.0, 110.0);
  double size = 40.0;    ///< square side
  double width = 40.0;   ///< eight / oval extent along x
  double height = 20.0;  ///< eight / oval extent along y
  double radius = 41.0;  ///< circle
  bool closed = true;    ///< repeat the first node as the last
  std::vector<Eigen::Vector3d> points;  ///< polyline vertices
  Eigen::Vector3d amplitude = Eigen::Vector3d::Zero();  ///< parametric
  Eigen::Vector3d frequency = Eigen::Vector3d::Ones();
  Eigen::Vector3d phase_deg = Eigen::Vector3d::Zero();
};

/// Throws ValidationError naming the offending field.
void validate_path(const PathSpec& spec);

/// N x 3 nodes sampled uniformly in the path parameter (arc length for the
/// square and the polyline, angle for the others, t in [0, 2pi]).
Eigen::MatrixXd generate_path(const PathSpec& spec);

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string field = {});
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& why);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Scenario {
  std::string name;
  std::string description;
  std::string provenance;
  RobotParams robot;
  Scene scene;
  PathSpec path;
  SolverSettings solver;
  Mode mode = Mode::Plain;
  Eigen::Vector3d orientation_deg = Eigen::Vector3d::Zero();
  std::optional<Eigen::VectorXd> initial_q;

  TrackRequest request() const;
};

inline constexpr int kScenarioVersion = 1;

/// Parses and validates a scenario document. Missing optional fields take
/// the defaults of default_settings() and reference_robot(); the body radii
/// are required.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& file);

enum class ResultFormat { Csv, Json };

/// Header row of the CSV export for an n-segment robot.
std::string csv_header(int segments);
std::string result_to_csv(const PlanResult& result);
std::string result_to_json(const PlanResult& result);
PlanResult result_from_json(const std::string& text);

/// Throws IoError when the destination cannot be written.
void export_result(const PlanResult& result, ResultFormat format, const std::filesystem::path& file);
PlanResult import_result_json(const std::filesystem::path& file);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace cdsr
