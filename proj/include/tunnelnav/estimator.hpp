#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tunnelnav/frame.hpp"
#include "tunnelnav/projection.hpp"
#include "tunnelnav/sensor.hpp"
#include "tunnelnav/tunnel.hpp"

namespace tunnelnav {

/// Output of the most-distant-point estimator at one robot position.
struct DirectionEstimate {
  std::vector<double> maxima_phis;  // refined maxima in [0, 2 pi)
  double phi_star = 0.0;            // in (-pi/2, pi/2]
  Vec3 line_dir = Vec3::Zero();     // spans the estimated line; sign is arbitrary
  bool well_posed = false;          // exactly two maxima
  bool wrap_ambiguous = false;      // wrapped maxima straddle +-pi/2
  double alpha = 0.0;
  ProjectionResult foot;
  ShapeFrame frame;
};

struct ExactnessReport {
  double angle = 0.0;  // in [0, pi/2]
  double alpha_e = 0.0;
  bool useful = false;  // angle below the meridian discrepancy floor
};

struct EstimatorOptions {
  bool strict = true;
  double delta_s = 0.0;        // active-zone margin; 0 disables the check
  double angle_tol = 1e-6;     // stopping tolerance of the maxima refinement
  ProjectionOptions projection{};
};

/// Profile evaluated at an arbitrary azimuth, used to refine grid maxima.
using ProfileFn = std::function<double(double phi)>;

/// Strict local maxima of a periodic sampled profile. NaN samples are skipped,
/// runs that are flat within `flat_tol` collapse to their midpoint. With a
/// profile function each maximum is polished by successive parabolic fits on
/// a shrinking stencil; otherwise one parabola through the grid neighbours is
/// used. Results are sorted and lie in [0, 2 pi). Throws EmptyProfile if every
/// sample is missing.
std::vector<double> find_local_maxima(const std::vector<double>& phis, const std::vector<double>& values,
                                      const ProfileFn& profile = {}, double angle_tol = 1e-6,
                                      double flat_tol = 1e-12);
/// Maxima of a scan's distance profile, refined with fresh ray casts.
std::vector<double> find_local_maxima(const ParametricTunnel& tunnel, const RayScan& scan, const SensorConfig& cfg,
                                      double angle_tol = 1e-6);

/// Shifts phi by a multiple of pi into (-pi/2, pi/2].
double wrap_half_pi(double phi);

/// Combines maxima into phi*, the line and the flags. Throws
/// WellPosednessViolation in strict mode unless there are exactly two maxima,
/// and EstimatorFailure when there are none.
DirectionEstimate combine_maxima(std::vector<double> maxima, const ShapeFrame& frame, bool strict);

DirectionEstimate mdpbe(const ParametricTunnel& tunnel, const Vec3& r, const SensorConfig& cfg,
                        const EstimatorOptions& options = {});
/// Same with a projection already at hand.
DirectionEstimate mdpbe(const ParametricTunnel& tunnel, const Vec3& r, const ProjectionResult& foot,
                        const SensorConfig& cfg, const EstimatorOptions& options = {});

/// Angle between the estimated line and the E- line at the foot. `floor` is
/// the discrepancy between E- and the meridian; usefulness needs angle < floor.
ExactnessReport exactness(const DirectionEstimate& est,
                          double floor = std::numeric_limits<double>::quiet_NaN());

struct SweepRow {
  double alpha = 0.0;
  double max_exactness = 0.0;
  double wellposed_rate = 0.0;
  int errors = 0;
  std::vector<double> exactness;     // per point, NaN where the estimate failed
  std::vector<std::string> messages;  // one per failed point
};

/// Runs the estimator at each point for each alpha (lenient mode, so the
/// well-posedness rate is measured rather than enforced). Per-point failures
/// are counted, never thrown.
std::vector<SweepRow> alpha_sweep(const ParametricTunnel& tunnel, const std::vector<Vec3>& points,
                                  const std::vector<double>& alphas, const SensorConfig& cfg,
                                  const EstimatorOptions& options = {});

}  // namespace tunnelnav
