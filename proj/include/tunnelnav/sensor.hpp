#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tunnelnav/frame.hpp"
#include "tunnelnav/projection.hpp"
#include "tunnelnav/tunnel.hpp"

namespace tunnelnav {

struct SensorConfig {
  double alpha_s = 0.4;           // widest cone half-angle the sensor can cast
  double alpha_e = 0.1;           // cone angle used by the estimator
  int n_phi = 256;
  double max_range = 5.0;
  double ray_march_step = 0.01;
  double root_tol = 1e-12;
  double patch_radius_eta = 0.2;

  /// Throws InvalidArgument unless 0 < alpha_e <= alpha_s < pi/2, n_phi >= 16
  /// and every length/tolerance is positive.
  void validate() const;
};

/// Distance profile d(alpha, phi) of one cone scan around the foot point.
struct RayScan {
  double alpha = 0.0;
  std::vector<double> phis;       // strictly increasing in [0, 2 pi)
  std::vector<double> distances;  // NaN where the ray missed
  std::vector<bool> in_patch;     // hit lies over the tangent disc of radius eta
  Vec3 origin = Vec3::Zero();
  ProjectionResult center;
  ShapeFrame frame;
  int missing = 0;

  /// Unit ray direction for azimuth phi: cos(alpha) d_hat + sin(alpha) e(phi).
  Vec3 ray_direction(double phi) const;
};

/// First crossing of S along origin + t dir, t > 0. Marches with a fixed
/// stride on the sign of <p - foot, N(foot)>, bisects the bracket to root_tol
/// and polishes with Newton on the chart. `seed` is a chart point near the
/// nearest point of the origin. Throws NoHit beyond max_range.
double ray_distance(const ParametricTunnel& tunnel, const Vec3& origin, const Vec3& dir, const SensorConfig& cfg,
                    std::optional<Vec2> seed = std::nullopt);

RayScan scan(const ParametricTunnel& tunnel, const Vec3& r, double alpha, const SensorConfig& cfg,
             const ProjectionOptions& projection = {});
/// Scan around an already computed projection of r.
RayScan scan(const ParametricTunnel& tunnel, const Vec3& r, const ProjectionResult& center, double alpha,
             const SensorConfig& cfg);

/// x(phi) = (d(alpha, phi) cos(alpha) - d) / sin^2(alpha); NaN for missing rays.
std::vector<double> scaled_depth_profile(const RayScan& scan);

/// Interval of x for which the tangent-plane argument stays in the eta-disc.
std::pair<double, double> scaled_depth_interval(double d, double alpha, double eta);

/// Height g_c(p) of S over the tangent plane at c along N(c): the surface
/// point is p + g_c(p) N(c). Throws PatchEscape when |g| > eta or the root
/// search fails.
double patch_height(const ParametricTunnel& tunnel, const Vec2& c_uv, const Vec3& p, const SensorConfig& cfg);

/// Central-difference gradient of g_c at p in the tangent plane (ambient vector).
Vec3 patch_gradient(const ParametricTunnel& tunnel, const Vec2& c_uv, const Vec3& p, const SensorConfig& cfg,
                    double step = 1e-6);

/// omega_c(p) = g_c(p) - II_c(p - c, p - c) / 2.
double quadratic_remainder(const ParametricTunnel& tunnel, const Vec2& c_uv, const Vec3& p, const SensorConfig& cfg);

/// Small-cone limit y(phi) = -d^2 (kappa_- cos^2 phi + kappa_+ sin^2 phi) / 2.
double limit_depth(const ShapeFrame& frame, double d, double phi);

/// Root of x = -g_c(c + (d + x sin^2 a) e(phi) tan a) / sin^2 a by fixed-point
/// iteration from x0. Throws PatchEscape when an iterate leaves the patch.
double solve_scaled_depth(const ParametricTunnel& tunnel, const ShapeFrame& frame, double d, double phi, double alpha,
                          const SensorConfig& cfg, double x0);

}  // namespace tunnelnav
