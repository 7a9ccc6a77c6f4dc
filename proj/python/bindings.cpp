#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tunnelnav/audit.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/estimator.hpp"
#include "tunnelnav/frame.hpp"
#include "tunnelnav/navsim.hpp"
#include "tunnelnav/offset.hpp"
#include "tunnelnav/projection.hpp"
#include "tunnelnav/scenario.hpp"
#include "tunnelnav/sensor.hpp"
#include "tunnelnav/tunnel.hpp"

namespace py = pybind11;
using namespace tunnelnav;

namespace {

py::dict constants_dict(const TunnelConstants& c) {
  py::dict d;
  d["delta_tau"] = c.delta_tau;
  d["delta_kappa"] = c.delta_kappa;
  d["theta_min"] = c.theta_min;
  d["theta_floor"] = c.theta_floor();
  d["L_N"] = c.L_N;
  d["L_kappa"] = c.L_kappa;
  d["L_E"] = c.L_E;
  d["L_B"] = c.L_B;
  d["delta_B_minus"] = c.delta_B_minus;
  d["delta_B_plus"] = c.delta_B_plus;
  d["L_tau"] = c.L_tau;
  d["eta"] = c.eta;
  d["max_abs_kappa"] = c.max_abs_kappa;
  return d;
}

py::dict report_dict(const SolveReport& r, const SimLog& log) {
  py::dict d;
  d["solved"] = r.solved;
  d["closed"] = log.closed;
  d["t0"] = r.t0;
  d["horizon"] = r.horizon;
  d["direction_sign"] = r.direction_sign;
  d["min_abs_bdot"] = r.min_abs_bdot;
  d["v_b_required"] = r.v_b_required;
  d["d_monotone"] = r.d_monotone;
  d["final_d_error"] = r.final_d_error;
  d["end_reached"] = r.end_reached;
  d["contact"] = log.contact;
  d["error"] = log.error;
  return d;
}

// Rows as an (n, 9) array: t, x, y, z, d, b, phi_star, exactness, well_posed.
Eigen::MatrixXd rows_array(const SimLog& log) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(log.rows.size()), 9);
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const SimRow& r = log.rows[i];
    m.row(static_cast<Eigen::Index>(i)) << r.t, r.position[0], r.position[1], r.position[2], r.d, r.b, r.phi_star,
        r.exactness, r.well_posed ? 1.0 : 0.0;
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_tunnelnav, m) {
  m.doc() = "Tunnel geometry kernel, cone sensor, direction estimator and navigation simulator";

  py::register_exception<TunnelError>(m, "TunnelError", PyExc_RuntimeError);

  py::class_<ParametricTunnel>(m, "Tunnel")
      .def_static("cylinder", &ParametricTunnel::cylinder, py::arg("R"),
                  py::arg("length") = std::numeric_limits<double>::infinity())
      .def_static("torus", &ParametricTunnel::torus, py::arg("R"), py::arg("r"))
      .def_static("revolution", &ParametricTunnel::revolution, py::arg("profile"), py::arg("b_min"), py::arg("b_max"))
      .def_property_readonly("kind", [](const ParametricTunnel& t) { return std::string(to_string(t.kind())); })
      .def_property_readonly("is_open", &ParametricTunnel::is_open)
      .def("point", [](const ParametricTunnel& t, double u, double v) { return t.point({u, v}); })
      .def("basic_coordinate", [](const ParametricTunnel& t, double u, double v) { return t.basis({u, v}).b; });

  py::class_<ShapeFrame>(m, "ShapeFrame")
      .def_property_readonly("uv", [](const ShapeFrame& f) { return f.uv; })
      .def_readonly("point", &ShapeFrame::point)
      .def_readonly("N", &ShapeFrame::N)
      .def_readonly("kappa_minus", &ShapeFrame::kappa_minus)
      .def_readonly("kappa_plus", &ShapeFrame::kappa_plus)
      .def_readonly("E_minus", &ShapeFrame::E_minus)
      .def_readonly("E_plus", &ShapeFrame::E_plus)
      .def_readonly("tau", &ShapeFrame::tau)
      .def_readonly("grad_B", &ShapeFrame::grad_B)
      .def("shape_operator", &ShapeFrame::shape_operator3);
  m.def("surface_frame", [](const ParametricTunnel& t, double u, double v) { return surface_frame(t, {u, v}); },
        py::arg("tunnel"), py::arg("u"), py::arg("v"));

  py::class_<ProjectionResult>(m, "Projection")
      .def_property_readonly("foot_uv", [](const ProjectionResult& p) { return p.foot_uv; })
      .def_readonly("foot_point", &ProjectionResult::foot_point)
      .def_readonly("distance", &ProjectionResult::distance)
      .def_readonly("direction", &ProjectionResult::direction)
      .def_readonly("uniqueness_gap", &ProjectionResult::uniqueness_gap)
      .def_readonly("boundary_distance", &ProjectionResult::boundary_distance);
  m.def(
      "project",
      [](const ParametricTunnel& t, const Vec3& r, bool oracle, double delta_s) {
        ProjectionOptions opt;
        opt.oracle = oracle;
        opt.delta_s = delta_s;
        return project(t, r, opt);
      },
      py::arg("tunnel"), py::arg("r"), py::arg("oracle") = false, py::arg("delta_s") = 0.0);
  m.def(
      "offset_point",
      [](const ParametricTunnel& t, double d, double u, double v, double d_plus) {
        return offset_point(t, d, {u, v}, d_plus);
      },
      py::arg("tunnel"), py::arg("d"), py::arg("u"), py::arg("v"), py::arg("d_plus"));
  m.def("sine_angle_scaling", py::overload_cast<const Mat2&, const Vec2&, const Vec2&>(&sine_angle_scaling),
        py::arg("Q"), py::arg("A"), py::arg("B"));

  m.def(
      "audit",
      [](const ParametricTunnel& t, double d_plus, int grid) {
        const RegularityAudit a = regularity_audit(t, grid, d_plus);
        py::dict d = constants_dict(a.constants);
        d["passed"] = a.passed;
        d["failures"] = a.failures;
        return d;
      },
      py::arg("tunnel"), py::arg("d_plus"), py::arg("grid") = 64);

  py::class_<SensorConfig>(m, "SensorConfig")
      .def(py::init<>())
      .def_readwrite("alpha_s", &SensorConfig::alpha_s)
      .def_readwrite("alpha_e", &SensorConfig::alpha_e)
      .def_readwrite("n_phi", &SensorConfig::n_phi)
      .def_readwrite("max_range", &SensorConfig::max_range)
      .def_readwrite("ray_march_step", &SensorConfig::ray_march_step)
      .def_readwrite("root_tol", &SensorConfig::root_tol)
      .def_readwrite("patch_radius_eta", &SensorConfig::patch_radius_eta);

  py::class_<RayScan>(m, "RayScan")
      .def_readonly("alpha", &RayScan::alpha)
      .def_readonly("phis", &RayScan::phis)
      .def_readonly("distances", &RayScan::distances)
      .def_readonly("in_patch", &RayScan::in_patch)
      .def_readonly("center", &RayScan::center)
      .def_readonly("frame", &RayScan::frame)
      .def_readonly("missing", &RayScan::missing)
      .def("scaled_depth", &scaled_depth_profile);
  m.def(
      "scan",
      [](const ParametricTunnel& t, const Vec3& r, double alpha, const SensorConfig& cfg) {
        return scan(t, r, alpha, cfg);
      },
      py::arg("tunnel"), py::arg("r"), py::arg("alpha"), py::arg("config") = SensorConfig{});
  m.def("ray_distance",
        [](const ParametricTunnel& t, const Vec3& o, const Vec3& dir, const SensorConfig& cfg) {
          return ray_distance(t, o, dir, cfg);
        },
        py::arg("tunnel"), py::arg("origin"), py::arg("direction"), py::arg("config") = SensorConfig{});

  py::class_<DirectionEstimate>(m, "DirectionEstimate")
      .def_readonly("maxima_phis", &DirectionEstimate::maxima_phis)
      .def_readonly("phi_star", &DirectionEstimate::phi_star)
      .def_readonly("line_dir", &DirectionEstimate::line_dir)
      .def_readonly("well_posed", &DirectionEstimate::well_posed)
      .def_readonly("wrap_ambiguous", &DirectionEstimate::wrap_ambiguous)
      .def_readonly("foot", &DirectionEstimate::foot)
      .def_readonly("frame", &DirectionEstimate::frame)
      .def_property_readonly("exactness", [](const DirectionEstimate& e) { return exactness(e).angle; });
  m.def(
      "mdpbe",
      [](const ParametricTunnel& t, const Vec3& r, const SensorConfig& cfg, bool strict) {
        EstimatorOptions opt;
        opt.strict = strict;
        return mdpbe(t, r, cfg, opt);
      },
      py::arg("tunnel"), py::arg("r"), py::arg("config") = SensorConfig{}, py::arg("strict") = true);

  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init<>())
      .def_readwrite("speed", &ControllerConfig::speed)
      .def_readwrite("gain", &ControllerConfig::gain)
      .def_readwrite("dt", &ControllerConfig::dt)
      .def_readwrite("heading_sign", &ControllerConfig::heading_sign)
      .def_readwrite("horizon", &ControllerConfig::horizon)
      .def_readwrite("v_b_required", &ControllerConfig::v_b_required)
      .def_readwrite("converge_tol", &ControllerConfig::converge_tol);

  py::class_<Zone>(m, "Zone")
      .def(py::init([](double d_minus, double d_plus, double d_star, double delta_s) {
             return Zone{d_minus, d_plus, d_star, delta_s};
           }),
           py::arg("d_minus"), py::arg("d_plus"), py::arg("d_star"), py::arg("delta_s") = 0.0)
      .def_readwrite("d_minus", &Zone::d_minus)
      .def_readwrite("d_plus", &Zone::d_plus)
      .def_readwrite("d_star", &Zone::d_star)
      .def_readwrite("delta_s", &Zone::delta_s);

  m.def(
      "simulate",
      [](const ParametricTunnel& t, const ControllerConfig& controller, const SensorConfig& sensor, const Zone& zone,
         const Vec3& start) {
        const RegularityAudit audit = regularity_audit(t, 64, zone.d_plus);
        ControllerConfig cc = controller;
        cc.v_b_required = required_basis_rate(cc, audit.constants);
        const SimLog log = run_scenario(t, cc, sensor, zone, start);
        return py::make_tuple(rows_array(log), report_dict(evaluate_solve(log, cc, zone.d_star), log));
      },
      py::arg("tunnel"), py::arg("controller"), py::arg("sensor"), py::arg("zone"), py::arg("start"),
      "Closed-loop run. Returns (rows, report); rows columns are t, x, y, z, d, b, phi_star, exactness, well_posed.");

  m.def(
      "simulate_scenario",
      [](const std::string& path) {
        const Scenario s = load_scenario(path);
        const ParametricTunnel t = s.tunnel.build();
        const RegularityAudit audit = regularity_audit(t, s.audit_config());
        if (!s.start) throw TunnelError(ErrorCode::ConfigError, "scenario has no start point");
        ControllerConfig cc = s.controller;
        cc.v_b_required = required_basis_rate(cc, audit.constants);
        const SimLog log = run_scenario(t, cc, s.resolved_sensor(audit.constants), s.zone, *s.start);
        return py::make_tuple(rows_array(log), report_dict(evaluate_solve(log, cc, s.zone.d_star), log));
      },
      py::arg("path"), "Loads a JSON scenario and runs it like the `simulate` command.");
}
