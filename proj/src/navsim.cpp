#include "tunnelnav/navsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tunnelnav/errors.hpp"

namespace tunnelnav {

void ControllerConfig::validate() const {
  if (!(speed > 0.0 && dt > 0.0 && horizon > 0.0)) {
    throw TunnelError(ErrorCode::InvalidArgument, "controller speed, dt and horizon must be positive");
  }
  if (!(gain >= 0.0)) throw TunnelError(ErrorCode::InvalidArgument, "controller gain must be non-negative");
  if (heading_sign != 1 && heading_sign != -1) {
    throw TunnelError(ErrorCode::InvalidArgument, "heading_sign must be +1 or -1");
  }
  if (!(v_b_required >= 0.0 && converge_tol > 0.0)) {
    throw TunnelError(ErrorCode::InvalidArgument, "v_b_required must be >= 0 and converge_tol > 0");
  }
}

double basic_coordinate(const ParametricTunnel& tunnel, const ProjectionResult& foot, BasisContinuity* ctx) {
  const double raw = tunnel.basis(foot.foot_uv).b;
  if (ctx == nullptr || tunnel.basis_type() != BasisType::Circle) return raw;
  if (!ctx->started) {
    ctx->started = true;
    ctx->unwrapped = raw;
  } else {
    ctx->unwrapped += wrap_pi(raw - ctx->raw);
  }
  ctx->raw = raw;
  return ctx->unwrapped;
}

double basic_coordinate(const ParametricTunnel& tunnel, const Vec3& r, BasisContinuity* ctx,
                        const ProjectionOptions& options) {
  return basic_coordinate(tunnel, project(tunnel, r, options), ctx);
}

RobotState control_step(const RobotState& state, const DirectionEstimate& est, const ControllerConfig& cfg,
                        double d_star) {
  const Vec3 p = est.line_dir.normalized();
  double s = cfg.heading_sign >= 0 ? 1.0 : -1.0;
  if (state.heading.squaredNorm() > 0.0) s = p.dot(state.heading) >= 0.0 ? 1.0 : -1.0;

  Vec3 u = s * p + cfg.gain * (est.foot.distance - d_star) * est.foot.direction;
  const double len = u.norm();
  u = len > 1e-300 ? Vec3(u / len) : Vec3(s * p);

  RobotState next;
  next.t = state.t + cfg.dt;
  next.position = state.position + cfg.speed * cfg.dt * u;
  next.heading = u;
  return next;
}

double required_basis_rate(const ControllerConfig& cfg, const TunnelConstants& constants) {
  return cfg.v_b_required > 0.0 ? cfg.v_b_required : 0.05 * cfg.speed * constants.delta_B_minus;
}

SimLog run_scenario(const ParametricTunnel& tunnel, const ControllerConfig& cfg, const SensorConfig& sensor,
                    const Zone& zone, const Vec3& start, const ProjectionOptions& projection) {
  cfg.validate();
  sensor.validate();
  SimLog log;
  log.closed = !tunnel.is_open();

  ProjectionOptions popt = projection;
  popt.delta_s = tunnel.is_open() ? zone.delta_s : 0.0;
  EstimatorOptions eopt;
  eopt.projection = projection;

  RobotState state;
  state.position = start;
  BasisContinuity basis;
  const long steps = static_cast<long>(std::floor(cfg.horizon / cfg.dt + 1e-9));
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  for (long k = 0; k <= steps; ++k) {
    state.t = static_cast<double>(k) * cfg.dt;
    const Vec3& r = state.position;
    ProjectionResult foot;
    bool at_end = false;
    try {
      foot = project(tunnel, r, popt);
    } catch (const BoundaryProjection& e) {
      foot = e.result();
      at_end = true;
    } catch (const TunnelError& e) {
      log.error = e.what();
      break;
    }

    const ChartJet j = tunnel.jet(foot.foot_uv);
    const Vec3 n = tunnel.orientation() * j.Xu.cross(j.Xv).normalized();
    if (foot.direction.dot(n) >= 0.0) {
      log.contact = true;
      log.error = TunnelError(ErrorCode::SurfaceContact, "robot left the tunnel interior").what();
      break;
    }

    SimRow row;
    row.t = state.t;
    row.position = r;
    row.d = foot.distance;
    row.b = basic_coordinate(tunnel, foot, &basis);
    if (at_end) {
      row.phi_star = row.exactness = kNaN;
      log.rows.push_back(row);
      log.end_reached = true;
      break;
    }

    DirectionEstimate est;
    try {
      est = mdpbe(tunnel, r, foot, sensor, eopt);
    } catch (const TunnelError& e) {
      log.error = e.what();
      break;
    }
    row.phi_star = est.phi_star;
    row.exactness = exactness(est).angle;
    row.well_posed = est.well_posed;
    log.rows.push_back(row);

    if (k == steps) break;
    state = control_step(state, est, cfg, zone.d_star);
  }
  return log;
}

SolveReport evaluate_solve(const SimLog& log, const ControllerConfig& cfg, double d_star) {
  SolveReport rep;
  rep.end_reached = log.end_reached;
  rep.v_b_required = cfg.v_b_required;
  const auto& rows = log.rows;
  const int n = static_cast<int>(rows.size());
  if (n == 0) return rep;
  rep.horizon = rows.back().t;
  rep.final_d_error = std::abs(rows.back().d - d_star);
  if (n < 2) {
    rep.t0 = rows.back().t;
    rep.solved = !log.closed && log.end_reached && !log.contact;
    return rep;
  }

  std::vector<double> bdot(n);
  for (int i = 0; i < n; ++i) {
    const int a = std::max(i - 1, 0), b = std::min(i + 1, n - 1);
    bdot[i] = (rows[b].b - rows[a].b) / (rows[b].t - rows[a].t);
  }
  const double sign = bdot[n - 1] > 0.0 ? 1.0 : (bdot[n - 1] < 0.0 ? -1.0 : 0.0);
  const double slack = 1e-3 * d_star;
  auto rate_ok = [&](int i) { return sign != 0.0 && sign * bdot[i] >= cfg.v_b_required && sign * bdot[i] > 0.0; };
  auto err = [&](int i) { return std::abs(rows[i].d - d_star); };

  int i0 = n;
  if (rate_ok(n - 1)) {
    i0 = n - 1;
    while (i0 > 0 && rate_ok(i0 - 1) && err(i0) - err(i0 - 1) <= slack) --i0;
  }

  rep.direction_sign = static_cast<int>(sign);
  if (i0 < n) {
    rep.t0 = rows[i0].t;
    rep.d_monotone = true;
    rep.min_abs_bdot = std::numeric_limits<double>::infinity();
    for (int i = i0; i < n; ++i) rep.min_abs_bdot = std::min(rep.min_abs_bdot, std::abs(bdot[i]));
  } else {
    rep.t0 = rows.back().t;
    rep.min_abs_bdot = std::abs(bdot[n - 1]);
  }

  if (log.closed) {
    rep.solved = i0 < n - 1 && !log.contact && log.error.empty() && rep.final_d_error <= cfg.converge_tol;
  } else {
    rep.solved = log.end_reached && !log.contact;
  }
  return rep;
}

}  // namespace tunnelnav
