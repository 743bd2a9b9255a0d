#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "cdsr/cli.hpp"
#include "cdsr/scenarios.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = CDSR_SCENARIO_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "cdsr");
  std::ostringstream out, err;
  const int code = cdsr::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const char* name) { return (kScenarios / name).string(); }

}  // namespace

TEST_CASE("fk straight robot") {
  const Outcome o = run({"fk", "--q", "0", "0", "0", "0", "0", "0", "0"});
  CHECK(o.code == 0);
  CHECK(o.out.find("tip position [mm]: (0.000000, 0.000000, 100.000000)") != std::string::npos);
}

TEST_CASE("fk distal-only actuation bends the proximal segment") {
  const Outcome o = run({"fk", "--scenario", scenario("square_fixed_vertical.json"), "--q", "0", "0",
                         "0", "0", "-0.2", "0", "0"});
  REQUIRE(o.code == 0);
  const auto pos = o.out.find("segment 1: theta=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(o.out.substr(pos + 17)) > 0.0);
}

TEST_CASE("fk backbone ends at the printed tip") {
  const fs::path file = fs::temp_directory_path() / "cdsr_cli_backbone.csv";
  const Outcome o = run({"fk", "--q", "5", "-2", "0", "0", "0", "-3", "0", "--backbone",
                         file.string()});
  REQUIRE(o.code == 0);
  const std::string csv = cdsr::read_text_file(file);
  std::string last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  double x, y, z;
  char c1, c2;
  std::istringstream(last) >> x >> c1 >> y >> c2 >> z;
  std::istringstream printed(o.out.substr(o.out.find('(') + 1));
  double px, py, pz;
  printed >> px >> c1 >> py >> c2 >> pz;
  CHECK(x == doctest::Approx(px).epsilon(1e-6));
  CHECK(y == doctest::Approx(py).epsilon(1e-6));
  CHECK(z == doctest::Approx(pz).epsilon(1e-6));
  fs::remove(file);
}

TEST_CASE("model errors exit 2 with a tag") {
  const Outcome o = run({"fk", "--q", "0", "1", "0", "0", "0", "0", "0"});
  CHECK(o.code == 2);
  CHECK(o.err.find("cdsr: error[PositiveDisplacement]") == 0);

  const Outcome missing = run({"validate-scenario", "--scenario", "/nonexistent.json"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("error[IoError]") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"fk", "--bogus"}).code == 1);
  CHECK(run({"ik-track"}).code == 1);
  CHECK(run({"ik-track", "--scenario", scenario("square_fixed_vertical.json"), "--mode", "fast"}).code == 1);
  const Outcome help = run({"ik-track", "--help"});
  CHECK(help.code == 0);
  for (const char* flag : {"--scenario", "--mode", "--out", "--lambda2", "--eta", "--nodes", "--spacing"}) {
    CHECK(help.out.find(flag) != std::string::npos);
  }
}

TEST_CASE("validate-scenario") {
  const Outcome o = run({"validate-scenario", "--scenario", scenario("circle_obstacle.json")});
  CHECK(o.code == 0);
  CHECK(o.out.find("nodes=91") != std::string::npos);
  CHECK(o.out.find("obstacles=1") != std::string::npos);
}

TEST_CASE("collision-check") {
  const Outcome o = run({"collision-check", "--scenario", scenario("circle_obstacle.json"), "--q", "0",
                         "0", "0", "0", "0", "0", "0"});
  CHECK(o.code == 0);
  CHECK(o.out.find("clear") != std::string::npos);
}

TEST_CASE("ik-track with overrides writes results") {
  const fs::path file = fs::temp_directory_path() / "cdsr_cli_track.csv";
  const Outcome o = run({"ik-track", "--scenario", scenario("square_fixed_vertical.json"), "--nodes",
                         "21", "--lambda2", "0.1", "--out", file.string()});
  CHECK(o.code == 0);
  CHECK(o.out.find("nodes=21") != std::string::npos);
  CHECK(o.out.find("failures=0") != std::string::npos);
  const std::string csv = cdsr::read_text_file(file);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
  fs::remove(file);
}

TEST_CASE("compare-models") {
  const Outcome zero = run({"compare-models", "--q", "0", "0", "0", "0", "0", "0", "0"});
  CHECK(zero.code == 0);
  CHECK(zero.out.find("max_deviation=0.000000") != std::string::npos);

  const Outcome a = run({"compare-models", "--sweep", "50"});
  const Outcome b = run({"compare-models", "--sweep", "50", "--seed", "42"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const Outcome c = run({"compare-models", "--sweep", "50", "--seed", "7"});
  CHECK(c.out != a.out);
}
