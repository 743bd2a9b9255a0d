#include "cdsr/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "cdsr/scenarios.hpp"

namespace cdsr::cli {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

struct Options {
  std::string scenario;
  std::string mode;
  std::string out;
  std::string backbone;
  std::optional<double> lambda2;
  std::optional<double> eta;
  std::optional<int> nodes;
  std::optional<double> spacing;
  std::vector<double> q;
  int sweep = 0;
  std::uint64_t seed = 42;
  double max_tension = 0.5;
};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string vec3(const Eigen::Vector3d& v, const char* spec = "%.6f") {
  return "(" + fmt(v(0), spec) + ", " + fmt(v(1), spec) + ", " + fmt(v(2), spec) + ")";
}

/// Robot from the scenario when one is given, else the reference robot.
Scenario scenario_or_reference(const Options& o) {
  if (!o.scenario.empty()) return load_scenario(o.scenario);
  Scenario sc;
  sc.name = "reference";
  sc.robot = reference_robot();
  sc.solver = default_settings(sc.robot.n);
  sc.scene.R_sr = sc.robot.R_sr;
  return sc;
}

Actuation actuation_from(const Options& o, const RobotParams& p) {
  if (o.q.empty()) return Actuation::zero(p.n);
  if (static_cast<int>(o.q.size()) != p.actuation_size()) {
    throw ValidationError("--q", "needs " + std::to_string(p.actuation_size()) + " values");
  }
  return Actuation(Eigen::Map<const Eigen::VectorXd>(o.q.data(), static_cast<Eigen::Index>(o.q.size())));
}

void apply_overrides(const Options& o, Scenario& sc) {
  if (!o.mode.empty()) sc.mode = mode_from_string(o.mode);
  if (o.lambda2) sc.solver.lambda2 = *o.lambda2;
  if (o.eta) sc.solver.eta = *o.eta;
  if (o.nodes) sc.path.nodes = *o.nodes;
  if (o.spacing) sc.solver.spacing = *o.spacing;
  validate_settings(sc.solver, sc.robot.n);
  validate_path(sc.path);
}

int run_fk(const Options& o, std::ostream& out) {
  Scenario sc = scenario_or_reference(o);
  if (o.spacing) sc.solver.spacing = *o.spacing;
  const Actuation q = actuation_from(o, sc.robot);
  const RobotConfig rc = robot_configuration(sc.robot, q, sc.solver.model);
  const Pose tip = forward_kinematics(rc);
  const TipOrientation ori = tip_orientation(tip.R);

  out << "tip position [mm]: " << vec3(tip.p) << "\n";
  out << "tip angles x-y-z [deg]: " << vec3(ori.euler_deg, "%.4f") << "\n";
  out << "tilt from vertical [deg]: " << fmt(ori.tilt_deg, "%.4f") << "\n";
  for (std::size_t k = 0; k < rc.segments.size(); ++k) {
    const auto& s = rc.segments[k];
    out << "segment " << k + 1 << ": theta=" << fmt(s.theta * kRadToDeg, "%.4f")
        << " deg phi=" << fmt(s.phi * kRadToDeg, "%.4f") << " deg s=" << fmt(s.s, "%.6f")
        << " mm K_T=" << fmt(rc.statics[k].K_T, "%.6g") << "\n";
  }
  if (!o.backbone.empty()) {
    std::ostringstream csv;
    csv << "x,y,z\n";
    for (const auto& p : backbone_points(rc, sc.solver.spacing)) {
      csv << fmt(p(0), "%.10g") << ',' << fmt(p(1), "%.10g") << ',' << fmt(p(2), "%.10g") << '\n';
    }
    write_text_file(o.backbone, csv.str());
  }
  return kOk;
}

int run_track(const Options& o, std::ostream& out) {
  Scenario sc = load_scenario(o.scenario);
  apply_overrides(o, sc);
  const auto start = std::chrono::steady_clock::now();
  const PlanResult r = track_path(sc.robot, sc.request(), sc.solver);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!o.out.empty()) {
    const std::filesystem::path path(o.out);
    export_result(r, path.extension() == ".json" ? ResultFormat::Json : ResultFormat::Csv, path);
  }
  const Eigen::Index N = r.nodes();
  out << "scenario " << (sc.name.empty() ? o.scenario : sc.name) << " mode=" << to_string(sc.mode)
      << " nodes=" << N << "\n";
  out << "max_error=" << fmt(r.error_trace.maxCoeff(), "%.4f")
      << " mm mean_error=" << fmt(r.error_trace.mean(), "%.4f")
      << " mm max_G=" << fmt(r.g_trace.maxCoeff(), "%.4f")
      << " max_tilt=" << fmt(r.tilt_trace.maxCoeff(), "%.3f")
      << " deg min_tilt=" << fmt(r.tilt_trace.minCoeff(), "%.3f")
      << " deg failures=" << r.failures() << " wall_time=" << fmt(wall, "%.3f") << " s\n";
  if (r.aborted) return kAborted;
  return r.failures() > 0 ? kNodeFailures : kOk;
}

int run_collision(const Options& o, std::ostream& out) {
  Scenario sc = scenario_or_reference(o);
  if (o.spacing) sc.solver.spacing = *o.spacing;
  const Actuation q = actuation_from(o, sc.robot);
  const auto pts = backbone_points(sc.robot, q, sc.solver.spacing, sc.solver.model);
  for (std::size_t i = 0; i < sc.scene.obstacles.size(); ++i) {
    Scene single{{sc.scene.obstacles[i]}, sc.scene.R_sr};
    const double d = min_backbone_distance(pts, sc.scene.obstacles[i].center);
    const double G = collision_indicator(pts, single);
    out << "obstacle " << i << ": distance=" << fmt(d, "%.4f") << " mm G=" << fmt(G, "%.6f")
        << " " << to_string(classify(G)) << "\n";
  }
  const double G = collision_indicator(pts, sc.scene);
  out << "G=" << fmt(G, "%.6f") << " " << to_string(classify(G)) << "\n";
  return kOk;
}

int run_compare(const Options& o, std::ostream& out) {
  const Scenario sc = scenario_or_reference(o);
  const RobotParams& p = sc.robot;
  std::vector<Actuation> samples;
  if (o.sweep > 0) {
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> tension(-o.max_tension, 0.0);
    for (int s = 0; s < o.sweep; ++s) {
      Eigen::VectorXd f(p.cable_count());
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = tension(rng);
      samples.emplace_back(0.0, displacement_from_tension(Tension{f}, p.mu));
    }
  } else {
    samples.push_back(actuation_from(o, p));
  }

  std::ostringstream csv;
  csv << "sample";
  for (int i = 0; i < p.actuation_size(); ++i) csv << ",q" << i;
  csv << ",var_x,var_y,var_z,const_x,const_y,const_z,deviation\n";
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const ModelComparison c = compare_stiffness_models(p, samples[s]);
    csv << s;
    for (Eigen::Index i = 0; i < samples[s].size(); ++i) csv << ',' << fmt(samples[s].vector()(i), "%.10g");
    for (int a = 0; a < 3; ++a) csv << ',' << fmt(c.tip_variable(a), "%.10g");
    for (int a = 0; a < 3; ++a) csv << ',' << fmt(c.tip_constant(a), "%.10g");
    csv << ',' << fmt(c.deviation, "%.10g") << '\n';
    lo = std::min(lo, c.deviation);
    hi = std::max(hi, c.deviation);
    sum += c.deviation;
  }
  if (!o.out.empty()) {
    write_text_file(o.out, csv.str());
  } else {
    out << csv.str();
  }
  out << "samples=" << samples.size() << " min_deviation=" << fmt(lo, "%.6f")
      << " mm max_deviation=" << fmt(hi, "%.6f")
      << " mm mean_deviation=" << fmt(sum / static_cast<double>(samples.size()), "%.6f") << " mm\n";
  return kOk;
}

int run_validate(const Options& o, std::ostream& out) {
  Scenario sc = load_scenario(o.scenario);
  apply_overrides(o, sc);
  const Eigen::MatrixXd path = generate_path(sc.path);
  out << "ok: " << (sc.name.empty() ? o.scenario : sc.name) << " path=" << to_string(sc.path.kind)
      << " nodes=" << path.rows() << " mode=" << to_string(sc.mode)
      << " obstacles=" << sc.scene.obstacles.size() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinematics and constrained path tracking for cable-driven soft robots", "cdsr"};
  app.require_subcommand(1);
  Options o;

  auto add_scenario = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--scenario", o.scenario, "Scenario JSON file");
    if (required) opt->required();
  };
  auto add_q = [&](CLI::App* sub) {
    sub->add_option("--q", o.q, "Actuation q0 q11 q12 q13 ... (mm)")->expected(1, -1);
  };

  auto* fk = app.add_subcommand("fk", "Forward kinematics at one actuation");
  add_scenario(fk, false);
  add_q(fk);
  fk->add_option("--backbone", o.backbone, "Write sampled backbone points to this CSV");
  fk->add_option("--spacing", o.spacing, "Backbone sample spacing (mm)");

  auto* track = app.add_subcommand("ik-track", "Track a scenario path");
  add_scenario(track, true);
  track->add_option("--mode", o.mode, "Tracking mode")
      ->check(CLI::IsMember({"plain", "fixed-orientation", "avoid"}));
  track->add_option("--out", o.out, "Result file (.csv or .json)");
  track->add_option("--lambda2", o.lambda2, "Damping coefficient");
  track->add_option("--eta", o.eta, "Collision weight");
  track->add_option("--nodes", o.nodes, "Number of path nodes");
  track->add_option("--spacing", o.spacing, "Backbone sample spacing (mm)");

  auto* coll = app.add_subcommand("collision-check", "Collision indicator at one actuation");
  add_scenario(coll, true);
  add_q(coll);
  coll->add_option("--spacing", o.spacing, "Backbone sample spacing (mm)");

  auto* cmp = app.add_subcommand("compare-models", "Compressible vs constant stiffness tips");
  add_scenario(cmp, false);
  add_q(cmp);
  cmp->add_option("--sweep", o.sweep, "Number of random tension samples")->check(CLI::PositiveNumber);
  cmp->add_option("--seed", o.seed, "Random seed for --sweep");
  cmp->add_option("--max-tension", o.max_tension, "Largest tension magnitude in --sweep (N)")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--out", o.out, "Deviation table CSV");

  auto* val = app.add_subcommand("validate-scenario", "Load and validate a scenario file");
  add_scenario(val, true);
  val->add_option("--mode", o.mode, "Tracking mode")
      ->check(CLI::IsMember({"plain", "fixed-orientation", "avoid"}));
  val->add_option("--nodes", o.nodes, "Number of path nodes");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (fk->parsed()) return run_fk(o, out);
    if (track->parsed()) return run_track(o, out);
    if (coll->parsed()) return run_collision(o, out);
    if (cmp->parsed()) return run_compare(o, out);
    if (val->parsed()) return run_validate(o, out);
  } catch (const Error& e) {
    err << "cdsr: error[" << e.tag() << "]: " << e.what() << "\n";
    return kModelError;
  } catch (const std::exception& e) {
    err << "cdsr: error[Internal]: " << e.what() << "\n";
    return kModelError;
  }
  return kUsage;
}

}  // namespace cdsr::cli
