#include "tunnelnav/sensor.hpp"

#include <cmath>
#include <limits>

#include "tunnelnav/errors.hpp"
#include "tunnelnav/format.hpp"

namespace tunnelnav {

void SensorConfig::validate() const {
  auto fail = [](const char* what) { throw TunnelError(ErrorCode::InvalidArgument, what); };
  if (!(alpha_e > 0.0 && alpha_e <= alpha_s && alpha_s < kPi / 2.0)) fail("sensor needs 0 < alpha_e <= alpha_s < pi/2");
  if (n_phi < 16) fail("sensor needs n_phi >= 16");
  if (!(max_range > 0.0 && ray_march_step > 0.0 && root_tol > 0.0 && patch_radius_eta > 0.0)) {
    fail("sensor lengths and tolerances must be positive");
  }
}

Vec3 RayScan::ray_direction(double phi) const {
  const Vec3 e = std::cos(phi) * frame.E_minus + std::sin(phi) * frame.E_plus;
  return std::cos(alpha) * center.direction + std::sin(alpha) * e;
}

namespace {

struct Probe {
  double side;  // > 0 inside the tunnel
  Vec2 uv;
};

Probe probe(const ParametricTunnel& tunnel, const Vec3& p, const Vec2& seed) {
  const LocalProjection lp = project_local(tunnel, p, seed);
  // A foot stuck on an open edge means there is no surface under p.
  if (lp.on_edge) return {1.0, lp.uv};
  const ChartJet j = tunnel.jet(lp.uv);
  const Vec3 n = tunnel.orientation() * j.Xu.cross(j.Xv).normalized();
  return {(p - lp.foot).dot(n), lp.uv};
}

// Newton on X(u, v) - origin - t dir = 0.
bool polish_hit(const ParametricTunnel& tunnel, const Vec3& origin, const Vec3& dir, Vec2& uv, double& t) {
  for (int it = 0; it < 8; ++it) {
    const ChartJet j = tunnel.jet(uv);
    const Vec3 F = j.X - origin - t * dir;
    if (F.norm() < 1e-15 * (1.0 + origin.norm())) return true;
    Mat3 J;
    J.col(0) = j.Xu;
    J.col(1) = j.Xv;
    J.col(2) = -dir;
    const Vec3 step = J.partialPivLu().solve(-F);
    if (!step.allFinite()) return false;
    uv += step.head<2>();
    t += step[2];
    if (step.norm() < 1e-16 * (1.0 + t)) return true;
  }
  return (tunnel.point(uv) - origin - t * dir).norm() < 1e-12;
}

// Surface point above p along N(c): solves X(u, v) = p + t N.
bool line_hit(const ParametricTunnel& tunnel, const Vec3& p, const Vec3& n, Vec2 uv, double& t) {
  t = 0.0;
  for (int it = 0; it < 60; ++it) {
    const ChartJet j = tunnel.jet(uv);
    const Vec3 F = j.X - p - t * n;
    if (F.norm() < 1e-15 * (1.0 + p.norm())) return true;
    Mat3 J;
    J.col(0) = j.Xu;
    J.col(1) = j.Xv;
    J.col(2) = -n;
    Vec3 step = J.partialPivLu().solve(-F);
    if (!step.allFinite()) return false;
    // Damp long first steps so the iterate stays on the local sheet.
    const double limit = 0.5;
    if (step.head<2>().norm() > limit) step *= limit / step.head<2>().norm();
    uv += step.head<2>();
    t += step[2];
    if (step.norm() < 1e-16) break;
  }
  return (tunnel.point(uv) - p - t * n).norm() < 1e-11;
}

}  // namespace

double ray_distance(const ParametricTunnel& tunnel, const Vec3& origin, const Vec3& dir, const SensorConfig& cfg,
                    std::optional<Vec2> seed) {
  if (!seed) seed = project(tunnel, origin).foot_uv;
  const Vec3 u = dir.normalized();

  Probe last = probe(tunnel, origin, *seed);
  if (!(last.side > 0.0)) throw TunnelError(ErrorCode::InvalidArgument, "ray origin is not inside the tunnel");

  double lo = 0.0;
  double hi = std::numeric_limits<double>::quiet_NaN();
  Probe hit{};
  const int steps = static_cast<int>(std::ceil(cfg.max_range / cfg.ray_march_step));
  for (int k = 1; k <= steps; ++k) {
    const double t = std::min(k * cfg.ray_march_step, cfg.max_range);
    const Probe p = probe(tunnel, origin + t * u, last.uv);
    if (p.side <= 0.0) {
      hi = t;
      hit = p;
      break;
    }
    lo = t;
    last = p;
  }
  if (std::isnan(hi)) throw TunnelError(ErrorCode::NoHit, "no surface crossing within max_range " + fmt17(cfg.max_range));

  while (hi - lo > cfg.root_tol) {
    const double mid = 0.5 * (lo + hi);
    const Probe p = probe(tunnel, origin + mid * u, last.uv);
    if (p.side > 0.0) {
      lo = mid;
      last = p;
    } else {
      hi = mid;
      hit = p;
    }
  }

  double t = 0.5 * (lo + hi);
  Vec2 uv = hit.uv;
  if (polish_hit(tunnel, origin, u, uv, t) && t >= lo - cfg.root_tol && t <= hi + cfg.root_tol) return t;
  return 0.5 * (lo + hi);
}

RayScan scan(const ParametricTunnel& tunnel, const Vec3& r, double alpha, const SensorConfig& cfg,
             const ProjectionOptions& projection) {
  return scan(tunnel, r, project(tunnel, r, projection), alpha, cfg);
}

RayScan scan(const ParametricTunnel& tunnel, const Vec3& r, const ProjectionResult& center, double alpha,
             const SensorConfig& cfg) {
  cfg.validate();
  if (!(alpha > 0.0 && alpha <= cfg.alpha_s)) {
    throw TunnelError(ErrorCode::InvalidArgument, "scan angle must lie in (0, alpha_s]");
  }
  RayScan out;
  out.alpha = alpha;
  out.origin = r;
  out.center = center;
  out.frame = surface_frame(tunnel, center.foot_uv);
  out.phis.resize(cfg.n_phi);
  out.distances.resize(cfg.n_phi);
  out.in_patch.resize(cfg.n_phi);

  const Vec3& c = center.foot_point;
  for (int k = 0; k < cfg.n_phi; ++k) {
    const double phi = kTwoPi * k / cfg.n_phi;
    out.phis[k] = phi;
    const Vec3 dir = out.ray_direction(phi);
    try {
      const double t = ray_distance(tunnel, r, dir, cfg, center.foot_uv);
      out.distances[k] = t;
      const Vec3 offset = r + t * dir - c;
      out.in_patch[k] = (offset - offset.dot(out.frame.N) * out.frame.N).norm() <= cfg.patch_radius_eta;
    } catch (const TunnelError& e) {
      if (e.code() != ErrorCode::NoHit) throw;
      out.distances[k] = std::numeric_limits<double>::quiet_NaN();
      out.in_patch[k] = false;
      ++out.missing;
    }
  }
  if (out.missing * 10 > cfg.n_phi) {
    throw TunnelError(ErrorCode::ScanRejected,
                      std::to_string(out.missing) + " of " + std::to_string(cfg.n_phi) + " rays missed the surface");
  }
  return out;
}

std::vector<double> scaled_depth_profile(const RayScan& scan) {
  const double s2 = std::sin(scan.alpha) * std::sin(scan.alpha);
  const double ca = std::cos(scan.alpha);
  std::vector<double> x(scan.distances.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = (scan.distances[k] * ca - scan.center.distance) / s2;
  return x;
}

std::pair<double, double> scaled_depth_interval(double d, double alpha, double eta) {
  const double s = std::sin(alpha);
  const double half = eta * std::cos(alpha) / (s * s * s);
  const double shift = d / (s * s);
  return {-half - shift, half - shift};
}

double patch_height(const ParametricTunnel& tunnel, const Vec2& c_uv, const Vec3& p, const SensorConfig& cfg) {
  const ShapeFrame f = surface_frame(tunnel, c_uv);
  const Vec3 offset = p - f.point;
  const Vec3 planar = offset - offset.dot(f.N) * f.N;
  const double eta = cfg.patch_radius_eta;
  if (planar.norm() > eta * (1.0 + 1e-9)) {
    throw TunnelError(ErrorCode::PatchEscape, "point lies outside the tangent disc of radius " + fmt17(eta));
  }
  double g = 0.0;
  if (!line_hit(tunnel, f.point + planar, f.N, c_uv, g) || std::abs(g) > eta) {
    throw TunnelError(ErrorCode::PatchEscape, "no surface point within the slab |g| <= " + fmt17(eta));
  }
  return g;
}

Vec3 patch_gradient(const ParametricTunnel& tunnel, const Vec2& c_uv, const Vec3& p, const SensorConfig& cfg,
                    double step) {
  const ShapeFrame f = surface_frame(tunnel, c_uv);
  Vec3 grad = Vec3::Zero();
  for (const Vec3& e : f.ortho_basis) {
    const double forward = patch_height(tunnel, c_uv, p + step * e, cfg);
    const double backward = patch_height(tunnel, c_uv, p - step * e, cfg);
    grad += (forward - backward) / (2.0 * step) * e;
  }
  return grad;
}

double quadratic_remainder(const ParametricTunnel& tunnel, const Vec2& c_uv, const Vec3& p, const SensorConfig& cfg) {
  const ShapeFrame f = surface_frame(tunnel, c_uv);
  const Vec3 offset = p - f.point;
  const Vec3 planar = offset - offset.dot(f.N) * f.N;
  return patch_height(tunnel, c_uv, p, cfg) - 0.5 * second_fundamental_form(f, planar, planar);
}

double limit_depth(const ShapeFrame& frame, double d, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return -d * d * (frame.kappa_minus * c * c + frame.kappa_plus * s * s) / 2.0;
}

double solve_scaled_depth(const ParametricTunnel& tunnel, const ShapeFrame& frame, double d, double phi, double alpha,
                          const SensorConfig& cfg, double x0) {
  const double s2 = std::sin(alpha) * std::sin(alpha);
  const double ta = std::tan(alpha);
  const Vec3 e = std::cos(phi) * frame.E_minus + std::sin(phi) * frame.E_plus;
  double x = x0;
  for (int it = 0; it < 500; ++it) {
    const Vec3 p = frame.point + (d + x * s2) * ta * e;
    const double next = -patch_height(tunnel, frame.uv, p, cfg) / s2;
    const double change = std::abs(next - x);
    x = next;
    if (change <= cfg.root_tol * (1.0 + std::abs(x))) break;
  }
  return x;
}

}  // namespace tunnelnav
