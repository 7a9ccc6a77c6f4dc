#pragma once

#include <limits>

#include "tunnelnav/errors.hpp"
#include "tunnelnav/tunnel.hpp"

namespace tunnelnav {

struct ProjectionOptions {
  int grid = 64;                 // coarse samples per chart axis
  bool oracle = false;           // dense derivative-free scan instead of Newton refinement
  int oracle_grid = 256;
  double delta_s = 0.0;          // boundary vicinity for open tunnels; 0 disables the check
  double uniqueness_tol = 1e-6;  // relative to 1 + distance
  int max_candidates = 8;
};

/// Nearest point of S to a query point r.
struct ProjectionResult {
  Vec2 foot_uv = Vec2::Zero();
  Vec3 foot_point = Vec3::Zero();
  double distance = 0.0;
  Vec3 direction = Vec3::Zero();  // unit vector from r towards the foot
  double uniqueness_gap = std::numeric_limits<double>::infinity();
  double boundary_distance = std::numeric_limits<double>::infinity();
};

/// Raised when the foot lies within delta_s of the edge of an open tunnel.
/// Carries the full projection so callers can treat it as an end event.
class BoundaryProjection : public TunnelError {
 public:
  explicit BoundaryProjection(const ProjectionResult& result);
  const ProjectionResult& result() const noexcept { return result_; }

 private:
  ProjectionResult result_;
};

/// Global nearest-point projection: coarse lattice scan over the chart,
/// second-order refinement of the best basins, uniqueness check between them.
ProjectionResult project(const ParametricTunnel& tunnel, const Vec3& r, const ProjectionOptions& options = {});

/// Local refinement from a seed; follows the basin containing the seed.
/// `converged` is false when the iterate stalls on a chart edge.
struct LocalProjection {
  Vec2 uv = Vec2::Zero();
  Vec3 foot = Vec3::Zero();
  bool converged = false;
  bool on_edge = false;
};
LocalProjection project_local(const ParametricTunnel& tunnel, const Vec3& r, const Vec2& seed);

/// Euclidean distance from the chart point uv to the boundary of an open
/// tunnel (infinity for closed tunnels).
double distance_to_boundary(const ParametricTunnel& tunnel, const Vec2& uv);

}  // namespace tunnelnav
