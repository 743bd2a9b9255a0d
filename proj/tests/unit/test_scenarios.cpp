#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"

#include "cdsr/scenarios.hpp"

using namespace cdsr;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = CDSR_SCENARIO_DIR;

std::string minimal_scenario(const std::string& solver = "{}") {
  return R"({
  "version": 1,
  "robot": { "r": 3.0, "r_o": 4.0, "r_i": 2.0 },
  "path": { "kind": "circle", "nodes": 11 },
  "solver": )" + solver + "\n}";
}

PlanResult tiny_result() {
  RobotParams p = reference_robot();
  p.mu = 1.0;
  TrackRequest req;
  PathSpec spec;
  spec.kind = PathKind::Circle;
  spec.radius = 10.0;
  spec.center = {0, 0, 100};
  spec.nodes = 7;
  req.path = generate_path(spec);
  req.scene.R_sr = 4.0;
  req.scene.obstacles.push_back({{30, 30, 60}, 5.0});
  return track_path(p, req, default_settings(2));
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("cdsr_test_" + name);
}

}  // namespace

TEST_CASE("circle path") {
  PathSpec spec;
  spec.kind = PathKind::Circle;
  const Eigen::MatrixXd path = generate_path(spec);
  CHECK(path.rows() == 91);
  CHECK((path.row(0).transpose() - Eigen::Vector3d(41, 0, 110)).norm() < 1e-12);
  CHECK((path.row(45).transpose() - Eigen::Vector3d(-41, 0, 110)).norm() < 1e-12);
  CHECK((path.row(90) - path.row(0)).norm() < 1e-12);
}

TEST_CASE("square path spacing is uniform along each edge") {
  PathSpec spec;
  spec.kind = PathKind::Square;
  spec.nodes = 41;
  const Eigen::MatrixXd path = generate_path(spec);
  CHECK((path.row(0).transpose() - Eigen::Vector3d(-20, -20, 110)).norm() < 1e-12);
  for (Eigen::Index i = 1; i < path.rows(); ++i) {
    CHECK((path.row(i) - path.row(i - 1)).norm() == doctest::Approx(4.0));
    CHECK(std::max(std::abs(path(i, 0)), std::abs(path(i, 1))) == doctest::Approx(20.0));
    CHECK(path(i, 2) == 110.0);
  }
}

TEST_CASE("eight, oval and parametric paths") {
  PathSpec eight;
  eight.kind = PathKind::Eight;
  eight.center = {0, -25, 100};
  const Eigen::MatrixXd e = generate_path(eight);
  CHECK(e.col(0).maxCoeff() == doctest::Approx(20.0).epsilon(1e-3));
  CHECK(e.col(1).maxCoeff() == doctest::Approx(-15.0).epsilon(1e-3));

  PathSpec oval;
  oval.kind = PathKind::Oval;
  oval.nodes = 5;
  const Eigen::MatrixXd o = generate_path(oval);
  CHECK((o.row(1).transpose() - Eigen::Vector3d(0, 10, 110)).norm() < 1e-12);

  PathSpec wave;
  wave.kind = PathKind::Parametric;
  wave.amplitude = {10, 5, 0};
  wave.phase_deg = {90, 0, 0};
  const Eigen::MatrixXd w = generate_path(wave);
  CHECK((w.row(0).transpose() - Eigen::Vector3d(10, 0, 110)).norm() < 1e-12);
}

TEST_CASE("polyline includes both endpoints") {
  PathSpec spec;
  spec.kind = PathKind::Polyline;
  spec.nodes = 5;
  spec.closed = false;
  spec.points = {{0, 0, 100}, {8, 0, 100}};
  const Eigen::MatrixXd path = generate_path(spec);
  CHECK(path(4, 0) == doctest::Approx(8.0));
  CHECK(path(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("paths are deterministic and scale-equivariant") {
  for (PathKind kind : {PathKind::Square, PathKind::Eight, PathKind::Oval, PathKind::Circle}) {
    PathSpec spec;
    spec.kind = kind;
    spec.center = Eigen::Vector3d::Zero();
    const Eigen::MatrixXd a = generate_path(spec);
    CHECK(generate_path(spec) == a);
    spec.size *= 2.0;
    spec.width *= 2.0;
    spec.height *= 2.0;
    spec.radius *= 2.0;
    CHECK((generate_path(spec) - 2.0 * a).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("path validation") {
  CHECK_THROWS_AS(path_kind_from_string("spiral"), Error);
  PathSpec spec;
  spec.nodes = 1;
  CHECK_THROWS_AS(validate_path(spec), ValidationError);
  spec.nodes = 10;
  spec.radius = -1.0;
  CHECK_THROWS_AS(validate_path(spec), ValidationError);
}

TEST_CASE("shipped scenarios load") {
  const Scenario square = load_scenario(kScenarios / "square_fixed_vertical.json");
  CHECK(square.path.nodes == 91);
  CHECK(square.orientation_deg == Eigen::Vector3d::Zero());
  CHECK(square.mode == Mode::FixedOrientation);
  CHECK_FALSE(square.provenance.empty());

  const Scenario circle = load_scenario(kScenarios / "circle_obstacle.json");
  REQUIRE(circle.scene.obstacles.size() == 1);
  CHECK(circle.scene.obstacles[0].center == Eigen::Vector3d(-10, -30, 90));
  CHECK(circle.scene.obstacles[0].radius == 7.5);
  CHECK(circle.solver.eta == 0.1);
  CHECK(circle.mode == Mode::Avoid);

  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const Scenario sc = load_scenario(entry.path());
    CHECK_FALSE(sc.provenance.empty());
  }
}

TEST_CASE("defaults fill missing solver fields") {
  const Scenario sc = parse_scenario(minimal_scenario());
  const SolverSettings d = default_settings(2);
  CHECK(sc.solver.lambda2 == d.lambda2);
  CHECK(sc.solver.eta == d.eta);
  CHECK(sc.solver.q_min == d.q_min);
  CHECK(sc.solver.q_max == d.q_max);
  CHECK(sc.robot.R_sr == sc.robot.r_o);
  CHECK(sc.scene.R_sr == sc.robot.r_o);
}

TEST_CASE("malformed fields are reported by name") {
  try {
    parse_scenario(minimal_scenario(R"({ "lambda2": "large" })"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field().find("lambda2") != std::string::npos);
  }
  try {
    parse_scenario("{\n  \"version\": 1,\n  \"robot\": {,\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_scenario(minimal_scenario(R"({ "lambda2": -1.0 })"));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field().find("lambda2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario(R"({ "version": 2 })"), Error);
  CHECK_THROWS_AS(parse_scenario(R"({ "version": 1, "robot": { "r": 3.0 } })"), Error);
}

TEST_CASE("csv export") {
  CHECK(csv_header(2) ==
        "node,q0,q11,q12,q13,q21,q22,q23,tip_x,tip_y,tip_z,err_norm,alpha,beta,gamma,tilt,G,iters,"
        "status");
  PlanResult empty;
  empty.schedule.resize(0, 7);
  CHECK(result_to_csv(empty) == csv_header(2) + "\n");

  const PlanResult r = tiny_result();
  const std::string csv = result_to_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == r.nodes() + 1);
}

TEST_CASE("91-node run exports 92 csv lines") {
  RobotParams p = reference_robot();
  p.mu = 1.0;
  PathSpec spec;
  spec.radius = 10.0;
  spec.center = {0, 0, 100};
  TrackRequest req;
  req.path = generate_path(spec);
  const PlanResult r = track_path(p, req, default_settings(2));
  const fs::path file = temp_file("rows.csv");
  export_result(r, ResultFormat::Csv, file);
  const std::string text = read_text_file(file);
  CHECK(std::count(text.begin(), text.end(), '\n') == 92);
  fs::remove(file);
}

TEST_CASE("json round trip is exact") {
  const PlanResult r = tiny_result();
  const fs::path file = temp_file("round.json");
  export_result(r, ResultFormat::Json, file);
  const PlanResult back = import_result_json(file);
  CHECK(back.schedule == r.schedule);
  CHECK(back.smoothed_schedule == r.smoothed_schedule);
  CHECK(back.tip_trace == r.tip_trace);
  CHECK(back.error_trace == r.error_trace);
  CHECK(back.orientation_trace == r.orientation_trace);
  CHECK(back.tilt_trace == r.tilt_trace);
  CHECK(back.g_trace == r.g_trace);
  CHECK(back.iters == r.iters);
  CHECK(back.status == r.status);
  CHECK(back.reasons == r.reasons);
  CHECK(back.aborted == r.aborted);
  CHECK(result_to_json(back) == result_to_json(r));
  fs::remove(file);
}

TEST_CASE("unwritable destination") {
  CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x/out.csv", "x"), Error);
  CHECK_THROWS_AS(read_text_file("/nonexistent-dir/in.json"), Error);
}
