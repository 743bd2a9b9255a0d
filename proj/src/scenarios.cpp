#include "cdsr/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace cdsr {

namespace {

using json = nlohmann::json;

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

/// Field access with errors that name the dotted path of the field.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  Node child(const char* key) const {
    const std::string p = join(key);
    if (!j_.contains(key)) throw ValidationError(p, "is required");
    if (!j_.at(key).is_object()) throw ParseError(p + ": expected an object", 0, p);
    return Node(j_.at(key), p);
  }

  double number(const char* key) const {
    const std::string p = join(key);
    if (!j_.contains(key)) throw ValidationError(p, "is required");
    return as_number(j_.at(key), p);
  }
  double number(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const std::string p = join(key);
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ParseError(p + ": expected an integer", 0, p);
    return v.get<int>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string p = join(key);
    if (!j_.at(key).is_boolean()) throw ParseError(p + ": expected true or false", 0, p);
    return j_.at(key).get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const std::string p = join(key);
    if (!j_.at(key).is_string()) throw ParseError(p + ": expected a string", 0, p);
    return j_.at(key).get<std::string>();
  }

  Eigen::VectorXd vector(const char* key) const { return as_vector(j_.at(key), join(key)); }

  Eigen::Vector3d vector3(const char* key) const {
    const Eigen::VectorXd v = vector(key);
    if (v.size() != 3) throw ValidationError(join(key), "needs 3 entries");
    return v;
  }

  Eigen::MatrixXd matrix(const char* key) const {
    const std::string p = join(key);
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ParseError(p + ": expected an array of rows", 0, p);
    const auto rows = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd M;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::VectorXd row = as_vector(v[r], p + "[" + std::to_string(r) + "]");
      if (r == 0) M.resize(rows, row.size());
      if (row.size() != M.cols()) throw ValidationError(p, "rows must have equal length");
      M.row(r) = row.transpose();
    }
    return M;
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }
  std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  static double as_number(const json& v, const std::string& p) {
    if (!v.is_number()) throw ParseError(p + ": expected a number", 0, p);
    return v.get<double>();
  }

  static Eigen::VectorXd as_vector(const json& v, const std::string& p) {
    if (!v.is_array()) throw ParseError(p + ": expected an array of numbers", 0, p);
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = as_number(v[i], p + "[" + std::to_string(i) + "]");
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

RobotParams parse_robot(const Node& r) {
  RobotParams p = reference_robot();
  p.n = r.integer("n", p.n);
  p.L = r.number("L", p.L);
  p.r = r.number("r");
  p.r_o = r.number("r_o");
  p.r_i = r.number("r_i");
  p.E = r.number("E", p.E);
  p.nu = r.number("nu", p.nu);
  p.zeta = r.number("zeta_deg", p.zeta / kDeg) * kDeg;
  p.mu = r.number("mu", p.mu);
  p.R_sr = r.number("R_sr", p.r_o);
  p.theta_max = r.number("theta_max_deg", p.theta_max / kDeg) * kDeg;
  try {
    validate_params(p);
  } catch (const InvalidParams& e) {
    throw ValidationError(r.path(), e.what());
  }
  return p;
}

PathSpec parse_path(const Node& j) {
  PathSpec s;
  const std::string kind = j.text("kind", "");
  if (kind.empty()) throw ValidationError(j.join("kind"), "is required");
  s.kind = path_kind_from_string(kind);
  s.nodes = j.integer("nodes", s.nodes);
  if (j.has("center")) s.center = j.vector3("center");
  s.size = j.number("size", s.size);
  s.width = j.number("width", s.width);
  s.height = j.number("height", s.height);
  s.radius = j.number("radius", s.radius);
  s.closed = j.boolean("closed", s.kind != PathKind::Polyline);
  if (j.has("points")) {
    const Eigen::MatrixXd P = j.matrix("points");
    if (P.cols() != 3) throw ValidationError(j.join("points"), "rows need 3 entries");
    for (Eigen::Index i = 0; i < P.rows(); ++i) s.points.emplace_back(P.row(i).transpose());
  }
  if (j.has("amplitude")) s.amplitude = j.vector3("amplitude");
  if (j.has("frequency")) s.frequency = j.vector3("frequency");
  if (j.has("phase_deg")) s.phase_deg = j.vector3("phase_deg");
  validate_path(s);
  return s;
}

StiffnessModel parse_model(const std::string& text, const std::string& field) {
  if (text == "compressible") return StiffnessModel::Compressible;
  if (text == "constant") return StiffnessModel::Constant;
  throw ValidationError(field, "must be 'compressible' or 'constant'");
}

SolverSettings parse_solver(const Node& j, int segments) {
  SolverSettings s = default_settings(segments);
  s.lambda2 = j.number("lambda2", s.lambda2);
  s.eta = j.number("eta", s.eta);
  if (j.has("A")) s.A = j.matrix("A");
  if (j.has("A_diag")) s.A = j.vector("A_diag").asDiagonal();
  if (j.has("b")) s.b = j.vector("b");
  if (j.has("q_min")) s.q_min = j.vector("q_min");
  if (j.has("q_max")) s.q_max = j.vector("q_max");
  if (j.has("dq_init")) s.dq_init = j.vector("dq_init");
  s.threshold = j.number("threshold", s.threshold);
  s.max_inner_iters = j.integer("max_inner_iters", s.max_inner_iters);
  s.median_window = j.integer("median_window", s.median_window);
  s.spacing = j.number("spacing", s.spacing);
  s.orientation_weight = j.number("orientation_weight", s.orientation_weight);
  if (j.has("orientation_axis_weights")) {
    s.orientation_axis_weights = j.vector3("orientation_axis_weights");
  }
  s.orientation_threshold_deg = j.number("orientation_threshold_deg", s.orientation_threshold_deg);
  s.failure_tolerance = j.number("failure_tolerance", s.failure_tolerance);
  s.clearance_target = j.number("clearance_target", s.clearance_target);
  s.model = parse_model(j.text("model", "compressible"), j.join("model"));
  try {
    validate_settings(s, segments);
  } catch (const Error& e) {
    // Messages read "solver.<field>: <why>".
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (msg.rfind("solver.", 0) == 0 && colon != std::string::npos) {
      throw ValidationError(msg.substr(0, colon), msg.substr(colon + 2));
    }
    throw ValidationError(j.path(), msg);
  }
  return s;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols, const std::string& field) {
  if (!j.is_array()) throw ParseError(field + ": expected an array of rows", 0, field);
  Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = Node::as_vector(j[r], field);
    if (row.size() != cols) throw ValidationError(field, "row has the wrong length");
    M.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return M;
}

}  // namespace

ParseError::ParseError(const std::string& what, int line, std::string field)
    : Error(ErrorCode::ParseError, what), line_(line), field_(std::move(field)) {}

ValidationError::ValidationError(std::string field, const std::string& why)
    : Error(ErrorCode::ValidationError, field + ": " + why), field_(std::move(field)) {}

std::string_view to_string(PathKind kind) {
  switch (kind) {
    case PathKind::Square: return "square";
    case PathKind::Eight: return "eight";
    case PathKind::Oval: return "oval";
    case PathKind::Circle: return "circle";
    case PathKind::Polyline: return "polyline";
    case PathKind::Parametric: return "parametric";
  }
  return "unknown";
}

PathKind path_kind_from_string(std::string_view text) {
  for (PathKind k : {PathKind::Square, PathKind::Eight, PathKind::Oval, PathKind::Circle,
                     PathKind::Polyline, PathKind::Parametric}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::UnknownKind, "unknown path kind '" + std::string(text) + "'");
}

void validate_path(const PathSpec& s) {
  if (s.nodes < 2) throw ValidationError("path.nodes", "must be >= 2");
  if (!s.center.allFinite()) throw ValidationError("path.center", "must be finite");
  switch (s.kind) {
    case PathKind::Square:
      if (!(s.size > 0.0)) throw ValidationError("path.size", "must be > 0");
      break;
    case PathKind::Eight:
    case PathKind::Oval:
      if (!(s.width > 0.0)) throw ValidationError("path.width", "must be > 0");
      if (!(s.height > 0.0)) throw ValidationError("path.height", "must be > 0");
      break;
    case PathKind::Circle:
      if (!(s.radius > 0.0)) throw ValidationError("path.radius", "must be > 0");
      break;
    case PathKind::Polyline: {
      if (s.points.size() < 2) throw ValidationError("path.points", "needs at least 2 vertices");
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < s.points.size(); ++i) {
        total += (s.points[i + 1] - s.points[i]).norm();
      }
      if (!(total > 0.0)) throw ValidationError("path.points", "polyline has zero length");
      break;
    }
    case PathKind::Parametric:
      if (!s.amplitude.allFinite() || !s.frequency.allFinite() || !s.phase_deg.allFinite()) {
        throw ValidationError("path.amplitude", "parametric coefficients must be finite");
      }
      break;
  }
}

Eigen::MatrixXd generate_path(const PathSpec& s) {
  validate_path(s);
  const int N = s.nodes;
  // Closed paths land on the start again at the last node.
  const double divisions = s.closed ? N - 1 : N;
  Eigen::MatrixXd P(N, 3);
  const Eigen::Vector3d& c = s.center;

  if (s.kind == PathKind::Square || s.kind == PathKind::Polyline) {
    std::vector<Eigen::Vector3d> verts;
    if (s.kind == PathKind::Square) {
      const double h = s.size / 2.0;
      verts = {c + Eigen::Vector3d(-h, -h, 0), c + Eigen::Vector3d(h, -h, 0),
               c + Eigen::Vector3d(h, h, 0), c + Eigen::Vector3d(-h, h, 0),
               c + Eigen::Vector3d(-h, -h, 0)};
    } else {
      verts = s.points;
      if (s.closed) verts.push_back(verts.front());
    }
    std::vector<double> cum(verts.size(), 0.0);
    for (std::size_t i = 1; i < verts.size(); ++i) {
      cum[i] = cum[i - 1] + (verts[i] - verts[i - 1]).norm();
    }
    const double total = cum.back();
    const double denom = (s.kind == PathKind::Polyline) ? N - 1 : divisions;
    std::size_t edge = 0;
    for (int j = 0; j < N; ++j) {
      const double u = total * j / denom;
      while (edge + 2 < verts.size() && u > cum[edge + 1]) ++edge;
      const double len = cum[edge + 1] - cum[edge];
      const double t = len > 0.0 ? std::clamp((u - cum[edge]) / len, 0.0, 1.0) : 0.0;
      P.row(j) = (verts[edge] + t * (verts[edge + 1] - verts[edge])).transpose();
    }
    return P;
  }

  for (int j = 0; j < N; ++j) {
    const double t = 2.0 * kPi * j / divisions;
    Eigen::Vector3d x = c;
    switch (s.kind) {
      case PathKind::Circle:
        x += Eigen::Vector3d(s.radius * std::cos(t), s.radius * std::sin(t), 0.0);
        break;
      case PathKind::Eight:
        x += Eigen::Vector3d(s.width / 2.0 * std::sin(t), s.height / 2.0 * std::sin(2.0 * t), 0.0);
        break;
      case PathKind::Oval:
        x += Eigen::Vector3d(s.width / 2.0 * std::cos(t), s.height / 2.0 * std::sin(t), 0.0);
        break;
      case PathKind::Parametric:
        for (int a = 0; a < 3; ++a) {
          x(a) += s.amplitude(a) * std::sin(s.frequency(a) * t + s.phase_deg(a) * kDeg);
        }
        break;
      default:
        break;
    }
    P.row(j) = x.transpose();
  }
  return P;
}

TrackRequest Scenario::request() const {
  TrackRequest r;
  r.path = generate_path(path);
  r.mode = mode;
  r.scene = scene;
  r.orientation_deg = orientation_deg;
  r.initial_q = initial_q;
  return r;
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte);
    throw ParseError("malformed JSON at line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object", 1);
  const Node root(doc, "");

  if (!root.has("version")) throw ValidationError("version", "is required");
  const int version = root.integer("version", 0);
  if (version != kScenarioVersion) {
    throw ValidationError("version", "unsupported version " + std::to_string(version));
  }

  Scenario sc;
  sc.name = root.text("name", "");
  sc.description = root.text("description", "");
  sc.provenance = root.text("provenance", "");
  sc.robot = parse_robot(root.child("robot"));
  sc.path = parse_path(root.child("path"));
  sc.solver = root.has("solver") ? parse_solver(root.child("solver"), sc.robot.n)
                                 : default_settings(sc.robot.n);
  sc.mode = Mode::Plain;
  if (root.has("mode")) {
    try {
      sc.mode = mode_from_string(root.text("mode", "plain"));
    } catch (const Error& e) {
      throw ValidationError("mode", e.what());
    }
  }
  if (root.has("orientation_deg")) sc.orientation_deg = root.vector3("orientation_deg");

  sc.scene.R_sr = sc.robot.R_sr;
  if (root.has("obstacles")) {
    const json& obs = doc.at("obstacles");
    if (!obs.is_array()) throw ParseError("obstacles: expected an array", 0, "obstacles");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string p = "obstacles[" + std::to_string(i) + "]";
      if (!obs[i].is_object()) throw ParseError(p + ": expected an object", 0, p);
      const Node o(obs[i], p);
      Sphere s;
      s.center = o.vector3("center");
      s.radius = o.number("radius");
      if (!(s.radius > 0.0)) throw ValidationError(p + ".radius", "must be > 0");
      sc.scene.obstacles.push_back(s);
    }
  }
  if (root.has("initial_q")) {
    Eigen::VectorXd q = root.vector("initial_q");
    if (q.size() != sc.robot.actuation_size()) {
      throw ValidationError("initial_q", "needs " + std::to_string(sc.robot.actuation_size()) +
                                             " entries");
    }
    sc.initial_q = q;
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  return parse_scenario(read_text_file(file));
}

std::string csv_header(int segments) {
  std::string h = "node,q0";
  for (int k = 1; k <= segments; ++k) {
    for (int i = 1; i <= 3; ++i) h += ",q" + std::to_string(k) + std::to_string(i);
  }
  h += ",tip_x,tip_y,tip_z,err_norm,alpha,beta,gamma,tilt,G,iters,status";
  return h;
}

std::string result_to_csv(const PlanResult& r) {
  const int segments = r.schedule.cols() > 0 ? static_cast<int>((r.schedule.cols() - 1) / 3) : 2;
  std::ostringstream os;
  os << csv_header(segments) << '\n';
  for (Eigen::Index i = 0; i < r.nodes(); ++i) {
    os << i;
    for (Eigen::Index c = 0; c < r.schedule.cols(); ++c) os << ',' << format_number(r.schedule(i, c));
    for (int a = 0; a < 3; ++a) os << ',' << format_number(r.tip_trace(i, a));
    os << ',' << format_number(r.error_trace(i));
    for (int a = 0; a < 3; ++a) os << ',' << format_number(r.orientation_trace(i, a));
    os << ',' << format_number(r.tilt_trace(i)) << ',' << format_number(r.g_trace(i)) << ','
       << r.iters[i] << ',' << to_string(r.status[i]) << '\n';
  }
  return os.str();
}

std::string result_to_json(const PlanResult& r) {
  json j;
  j["version"] = kScenarioVersion;
  j["nodes"] = r.nodes();
  j["aborted"] = r.aborted;
  j["schedule"] = matrix_json(r.schedule);
  j["smoothed_schedule"] = matrix_json(r.smoothed_schedule);
  j["tip_trace"] = matrix_json(r.tip_trace);
  j["error_trace"] = vector_json(r.error_trace);
  j["orientation_trace"] = matrix_json(r.orientation_trace);
  j["tilt_trace"] = vector_json(r.tilt_trace);
  j["g_trace"] = vector_json(r.g_trace);
  j["iters"] = r.iters;
  json status = json::array();
  for (auto s : r.status) status.push_back(std::string(to_string(s)));
  j["status"] = status;
  j["reasons"] = r.reasons;
  return j.dump(1) + "\n";
}

PlanResult result_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte);
    throw ParseError("malformed result JSON at line " + std::to_string(line), line);
  }
  const Node root(j, "");
  PlanResult r;
  try {
    const Eigen::Index N = root.integer("nodes", 0);
    const Eigen::Index cols =
        N > 0 && !j.at("schedule").empty() ? static_cast<Eigen::Index>(j.at("schedule")[0].size()) : 0;
    r.aborted = root.boolean("aborted", false);
    r.schedule = matrix_from(j.at("schedule"), cols, "schedule");
    r.smoothed_schedule = matrix_from(j.at("smoothed_schedule"), cols, "smoothed_schedule");
    r.tip_trace = matrix_from(j.at("tip_trace"), 3, "tip_trace");
    r.error_trace = root.vector("error_trace");
    r.orientation_trace = matrix_from(j.at("orientation_trace"), 3, "orientation_trace");
    r.tilt_trace = root.vector("tilt_trace");
    r.g_trace = root.vector("g_trace");
    r.iters = j.at("iters").get<std::vector<int>>();
    for (const auto& s : j.at("status")) r.status.push_back(node_status_from_string(s.get<std::string>()));
    r.reasons = j.at("reasons").get<std::vector<std::string>>();
    if (r.schedule.rows() != N || r.tip_trace.rows() != N || r.error_trace.size() != N ||
        static_cast<Eigen::Index>(r.status.size()) != N) {
      throw ValidationError("nodes", "trace lengths disagree with the node count");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("result JSON has a missing or mistyped field: ") + e.what(), 0);
  }
  return r;
}

void export_result(const PlanResult& r, ResultFormat format, const std::filesystem::path& file) {
  write_text_file(file, format == ResultFormat::Csv ? result_to_csv(r) : result_to_json(r));
}

PlanResult import_result_json(const std::filesystem::path& file) {
  return result_from_json(read_text_file(file));
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + file.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + file.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + file.string() + "'");
}

}  // namespace cdsr
