#pragma once

#include <string>
#include <vector>

#include "tunnelnav/audit.hpp"
#include "tunnelnav/estimator.hpp"
#include "tunnelnav/projection.hpp"
#include "tunnelnav/sensor.hpp"
#include "tunnelnav/tunnel.hpp"

namespace tunnelnav {

struct ControllerConfig {
  double speed = 0.2;
  double gain = 1.0;          // k_d
  double dt = 0.01;
  int heading_sign = 1;       // applied to the first estimated line
  double horizon = 20.0;
  double v_b_required = 0.0;  // 0 selects 0.05 * speed * min |grad B|
  double converge_tol = 0.01; // final |d - d*| needed for a closed-tunnel verdict

  void validate() const;
};

/// Operational zone: clearance bounds, target clearance and edge margin.
struct Zone {
  double d_minus = 0.0;
  double d_plus = 0.0;
  double d_star = 0.0;
  double delta_s = 0.0;
};

struct RobotState {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 heading = Vec3::Zero();  // zero before the first step
};

struct SimRow {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double d = 0.0;
  double b = 0.0;  // unwrapped basic coordinate
  double phi_star = 0.0;
  double exactness = 0.0;
  bool well_posed = false;
};

struct SimLog {
  std::vector<SimRow> rows;
  bool closed = true;
  bool end_reached = false;
  bool contact = false;
  std::string error;  // empty unless the run stopped on an error
};

struct SolveReport {
  bool solved = false;
  double t0 = 0.0;          // start of the longest suffix meeting both clauses
  int direction_sign = 0;
  double min_abs_bdot = 0.0;
  bool d_monotone = false;
  double final_d_error = 0.0;
  bool end_reached = false;
  double v_b_required = 0.0;
  double horizon = 0.0;
};

/// Unwrapping memory for circle bases.
struct BasisContinuity {
  bool started = false;
  double raw = 0.0;
  double unwrapped = 0.0;
};

/// B at the foot of r. Circle bases are unwrapped against `ctx` when given.
double basic_coordinate(const ParametricTunnel& tunnel, const Vec3& r, BasisContinuity* ctx = nullptr,
                        const ProjectionOptions& options = {});
double basic_coordinate(const ParametricTunnel& tunnel, const ProjectionResult& foot, BasisContinuity* ctx = nullptr);

/// One kinematic step: u = normalize(s p + k_d (d - d*) n), where n is the
/// unit vector towards the foot and s keeps the heading continuous.
RobotState control_step(const RobotState& state, const DirectionEstimate& est, const ControllerConfig& cfg,
                        double d_star);

/// 0.05 * speed * min |grad B| unless the config sets a positive value.
double required_basis_rate(const ControllerConfig& cfg, const TunnelConstants& constants);

/// Closed-loop run from `start` until the horizon, surface contact, an
/// estimator error or, for open tunnels, a foot within delta_s of the edge.
SimLog run_scenario(const ParametricTunnel& tunnel, const ControllerConfig& cfg, const SensorConfig& sensor,
                    const Zone& zone, const Vec3& start, const ProjectionOptions& projection = {});

/// Verdict for a log. `cfg.v_b_required` must already be resolved.
SolveReport evaluate_solve(const SimLog& log, const ControllerConfig& cfg, double d_star);

}  // namespace tunnelnav
