#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cdsr/scenarios.hpp"

namespace py = pybind11;
using namespace cdsr;

namespace {

Actuation to_actuation(const Eigen::VectorXd& q) { return Actuation(q); }

py::dict pose_dict(const Pose& T) {
  py::dict d;
  d["position"] = T.p;
  d["rotation"] = T.R;
  return d;
}

}  // namespace

PYBIND11_MODULE(cdsr, m) {
  m.doc() = "Compressible-curvature kinematics and path tracking for cable-driven soft robots";

  // Held for the lifetime of the interpreter; messages carry the error tag,
  // e.g. "[OverCompression] ...".
  static PyObject* error_type =
      py::exception<Error>(m, "Error", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = "[" + std::string(e.tag()) + "] " + e.what();
      PyErr_SetString(error_type, msg.c_str());
    }
  });

  py::enum_<StiffnessModel>(m, "StiffnessModel")
      .value("Compressible", StiffnessModel::Compressible)
      .value("Constant", StiffnessModel::Constant);

  py::enum_<Mode>(m, "Mode")
      .value("Plain", Mode::Plain)
      .value("FixedOrientation", Mode::FixedOrientation)
      .value("Avoid", Mode::Avoid);

  py::class_<RobotParams>(m, "RobotParams")
      .def(py::init<>())
      .def_readwrite("n", &RobotParams::n)
      .def_readwrite("L", &RobotParams::L)
      .def_readwrite("r", &RobotParams::r)
      .def_readwrite("r_o", &RobotParams::r_o)
      .def_readwrite("r_i", &RobotParams::r_i)
      .def_readwrite("E", &RobotParams::E)
      .def_readwrite("nu", &RobotParams::nu)
      .def_readwrite("zeta", &RobotParams::zeta)
      .def_readwrite("mu", &RobotParams::mu)
      .def_readwrite("R_sr", &RobotParams::R_sr)
      .def_readwrite("theta_max", &RobotParams::theta_max)
      .def_property_readonly("actuation_size", &RobotParams::actuation_size);

  m.def("reference_robot", &reference_robot);
  m.def("validate_params", &validate_params);

  py::class_<SegmentConfig>(m, "SegmentConfig")
      .def(py::init<>())
      .def_readwrite("theta", &SegmentConfig::theta)
      .def_readwrite("phi", &SegmentConfig::phi)
      .def_readwrite("kappa", &SegmentConfig::kappa)
      .def_readwrite("s", &SegmentConfig::s)
      .def_readwrite("direction_defined", &SegmentConfig::direction_defined);

  m.def("tension_norm", &tension_norm);
  m.def("bend_direction", &bend_direction);
  m.def("pcc_config_from_cables", &pcc_config_from_cables, py::arg("q_k"), py::arg("r"),
        py::arg("L"), py::arg("theta_max") = std::numbers::pi / 2.0);
  m.def("pcc_cables_from_config", &pcc_cables_from_config);
  m.def("arc_transform", [](const SegmentConfig& c) { return pose_dict(arc_transform(c)); });

  m.def(
      "segment_configs",
      [](const RobotParams& p, const Eigen::VectorXd& q, StiffnessModel model) {
        return robot_configuration(p, to_actuation(q), model).segments;
      },
      py::arg("params"), py::arg("q"), py::arg("model") = StiffnessModel::Compressible);
  m.def(
      "forward_kinematics",
      [](const RobotParams& p, const Eigen::VectorXd& q, StiffnessModel model) {
        return pose_dict(forward_kinematics(p, to_actuation(q), model));
      },
      py::arg("params"), py::arg("q"), py::arg("model") = StiffnessModel::Compressible);
  m.def(
      "backbone_points",
      [](const RobotParams& p, const Eigen::VectorXd& q, double spacing) {
        const auto pts = backbone_points(p, to_actuation(q), spacing);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(pts.size()), 3);
        for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i];
        return out;
      },
      py::arg("params"), py::arg("q"), py::arg("spacing") = 1.0);
  m.def(
      "tip_orientation",
      [](const RobotParams& p, const Eigen::VectorXd& q_c) {
        const TipOrientation o = tip_orientation_euler(p, q_c);
        py::dict d;
        d["euler_deg"] = o.euler_deg;
        d["tilt_deg"] = o.tilt_deg;
        return d;
      },
      py::arg("params"), py::arg("q_c"));

  m.def(
      "position_jacobian",
      [](const RobotParams& p, const Eigen::VectorXd& q) { return position_jacobian(p, to_actuation(q)); },
      py::arg("params"), py::arg("q"));
  m.def(
      "orientation_jacobian",
      [](const RobotParams& p, const Eigen::VectorXd& q_c) { return orientation_jacobian(p, q_c); },
      py::arg("params"), py::arg("q_c"));
  m.def("dls_step", &dls_step, py::arg("J"), py::arg("dx"), py::arg("lambda_sq"));
  m.def("nullspace_projector", &nullspace_projector);

  py::class_<Sphere>(m, "Sphere")
      .def(py::init([](const Eigen::Vector3d& c, double r) { return Sphere{c, r}; }),
           py::arg("center"), py::arg("radius"))
      .def_readwrite("center", &Sphere::center)
      .def_readwrite("radius", &Sphere::radius);

  py::class_<Scene>(m, "Scene")
      .def(py::init([](std::vector<Sphere> obstacles, double R_sr) {
             return Scene{std::move(obstacles), R_sr};
           }),
           py::arg("obstacles") = std::vector<Sphere>{}, py::arg("R_sr") = 4.0)
      .def_readwrite("obstacles", &Scene::obstacles)
      .def_readwrite("R_sr", &Scene::R_sr);

  m.def(
      "collision_indicator",
      [](const RobotParams& p, const Eigen::VectorXd& q, const Scene& scene, double spacing) {
        return collision_indicator(p, to_actuation(q), scene, spacing);
      },
      py::arg("params"), py::arg("q"), py::arg("scene"), py::arg("spacing") = 1.0);

  m.def(
      "compare_stiffness_models",
      [](const RobotParams& p, const Eigen::VectorXd& q) {
        const ModelComparison c = compare_stiffness_models(p, to_actuation(q));
        py::dict d;
        d["tip_variable"] = c.tip_variable;
        d["tip_constant"] = c.tip_constant;
        d["deviation"] = c.deviation;
        return d;
      },
      py::arg("params"), py::arg("q"));

  py::class_<PlanResult>(m, "PlanResult")
      .def_readonly("schedule", &PlanResult::schedule)
      .def_readonly("smoothed_schedule", &PlanResult::smoothed_schedule)
      .def_readonly("tip_trace", &PlanResult::tip_trace)
      .def_readonly("error_trace", &PlanResult::error_trace)
      .def_readonly("orientation_trace", &PlanResult::orientation_trace)
      .def_readonly("tilt_trace", &PlanResult::tilt_trace)
      .def_readonly("g_trace", &PlanResult::g_trace)
      .def_readonly("iters", &PlanResult::iters)
      .def_readonly("reasons", &PlanResult::reasons)
      .def_readonly("aborted", &PlanResult::aborted)
      .def_property_readonly("status",
                             [](const PlanResult& r) {
                               std::vector<std::string> out;
                               for (NodeStatus s : r.status) out.emplace_back(to_string(s));
                               return out;
                             })
      .def_property_readonly("failures", &PlanResult::failures)
      .def("to_csv", &result_to_csv)
      .def("to_json", &result_to_json);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("description", &Scenario::description)
      .def_readonly("provenance", &Scenario::provenance)
      .def_readwrite("robot", &Scenario::robot)
      .def_readwrite("scene", &Scenario::scene)
      .def_readwrite("mode", &Scenario::mode)
      .def_readwrite("orientation_deg", &Scenario::orientation_deg)
      .def_property_readonly("nodes", [](const Scenario& s) { return s.path.nodes; })
      .def("path", [](const Scenario& s) { return generate_path(s.path); })
      .def("track", [](const Scenario& s) { return track_path(s.robot, s.request(), s.solver); });

  m.def("load_scenario", &load_scenario, py::arg("file"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"));
}
