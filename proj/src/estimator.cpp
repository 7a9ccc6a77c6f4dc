#include "tunnelnav/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tunnelnav/errors.hpp"
#include "tunnelnav/format.hpp"

namespace tunnelnav {

namespace {

constexpr double kMinStencil = 1e-3;

// Successive parabolic interpolation on a shrinking symmetric stencil.
double polish_maximum(const ProfileFn& f, double phi, double h, double tol) {
  double f0 = f(phi);
  int moves = 0;
  for (int it = 0; it < 80; ++it) {
    const double fm = f(phi - h);
    const double fp = f(phi + h);
    if (fm > f0 || fp > f0) {
      if (++moves > 20) break;
      if (fp > fm) {
        phi += h;
        f0 = fp;
      } else {
        phi -= h;
        f0 = fm;
      }
      continue;
    }
    const double curvature = fm - 2.0 * f0 + fp;
    if (!(curvature < 0.0)) break;
    const double delta = 0.5 * h * (fm - fp) / curvature;
    phi += delta;
    f0 = f(phi);
    if (h <= kMinStencil && std::abs(delta) <= 0.1 * tol) break;
    h = std::max(0.25 * h, kMinStencil);
  }
  return phi;
}

}  // namespace

double wrap_half_pi(double phi) { return phi - kPi * std::ceil((phi - kPi / 2.0) / kPi); }

std::vector<double> find_local_maxima(const std::vector<double>& phis, const std::vector<double>& values,
                                      const ProfileFn& profile, double angle_tol, double flat_tol) {
  if (phis.size() != values.size()) throw TunnelError(ErrorCode::InvalidArgument, "profile size mismatch");
  std::vector<int> idx;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::isfinite(values[k])) idx.push_back(static_cast<int>(k));
  }
  if (idx.empty()) throw TunnelError(ErrorCode::EmptyProfile, "every sample of the profile is missing");
  const int m = static_cast<int>(idx.size());
  if (m < 3) return {};
  const double spacing = kTwoPi / static_cast<double>(phis.size());
  auto val = [&](int k) { return values[idx[((k % m) + m) % m]]; };
  auto ang = [&](int k) { return phis[idx[((k % m) + m) % m]]; };

  int start = -1;
  for (int k = 0; k < m; ++k) {
    if (std::abs(val(k) - val(k - 1)) > flat_tol) {
      start = k;
      break;
    }
  }
  if (start < 0) return {};

  struct Run {
    int first, last;  // unwrapped positions
  };
  std::vector<Run> runs;
  for (int k = start; k < start + m;) {
    int last = k;
    while (last + 1 < start + m && std::abs(val(last + 1) - val(last)) <= flat_tol) ++last;
    runs.push_back({k, last});
    k = last + 1;
  }
  if (runs.size() < 2) return {};

  std::vector<double> out;
  const int nr = static_cast<int>(runs.size());
  for (int j = 0; j < nr; ++j) {
    const Run& run = runs[j];
    const double left = val(runs[(j + nr - 1) % nr].last);
    const double right = val(runs[(j + 1) % nr].first);
    if (!(val(run.first) > left && val(run.last) > right)) continue;

    double phi = ang(run.first) + 0.5 * wrap_two_pi(ang(run.last) - ang(run.first));
    if (profile) {
      try {
        phi = polish_maximum(profile, phi, spacing, angle_tol);
      } catch (const TunnelError& e) {
        if (e.code() != ErrorCode::NoHit && e.code() != ErrorCode::PatchEscape) throw;
      }
    } else if (run.first == run.last && wrap_two_pi(ang(run.first) - ang(run.first - 1)) < 1.5 * spacing &&
               wrap_two_pi(ang(run.first + 1) - ang(run.first)) < 1.5 * spacing) {
      const double fm = left, f0 = val(run.first), fp = right;
      const double curvature = fm - 2.0 * f0 + fp;
      if (curvature < 0.0) phi += std::clamp(0.5 * spacing * (fm - fp) / curvature, -0.5 * spacing, 0.5 * spacing);
    }
    out.push_back(wrap_two_pi(phi));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> find_local_maxima(const ParametricTunnel& tunnel, const RayScan& scan, const SensorConfig& cfg,
                                      double angle_tol) {
  const ProfileFn profile = [&](double phi) {
    return ray_distance(tunnel, scan.origin, scan.ray_direction(phi), cfg, scan.center.foot_uv);
  };
  return find_local_maxima(scan.phis, scan.distances, profile, angle_tol);
}

DirectionEstimate combine_maxima(std::vector<double> maxima, const ShapeFrame& frame, bool strict) {
  if (maxima.empty()) throw TunnelError(ErrorCode::EstimatorFailure, "distance profile has no local maximum");
  if (strict && maxima.size() != 2) {
    throw TunnelError(ErrorCode::WellPosednessViolation,
                      "expected two local maxima, found " + std::to_string(maxima.size()));
  }
  DirectionEstimate est;
  est.well_posed = maxima.size() == 2;
  double lo = kPi, hi = -kPi, sum = 0.0;
  for (double phi : maxima) {
    const double w = wrap_half_pi(phi);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
    sum += w;
  }
  est.wrap_ambiguous = hi - lo > kPi / 2.0;
  est.phi_star = wrap_half_pi(sum / static_cast<double>(maxima.size()));
  est.line_dir = std::cos(est.phi_star) * frame.E_minus + std::sin(est.phi_star) * frame.E_plus;
  est.maxima_phis = std::move(maxima);
  est.frame = frame;
  return est;
}

DirectionEstimate mdpbe(const ParametricTunnel& tunnel, const Vec3& r, const SensorConfig& cfg,
                        const EstimatorOptions& options) {
  ProjectionOptions popt = options.projection;
  popt.delta_s = 0.0;
  return mdpbe(tunnel, r, project(tunnel, r, popt), cfg, options);
}

DirectionEstimate mdpbe(const ParametricTunnel& tunnel, const Vec3& r, const ProjectionResult& foot,
                        const SensorConfig& cfg, const EstimatorOptions& options) {
  if (options.delta_s > 0.0 && foot.boundary_distance < options.delta_s) {
    throw TunnelError(ErrorCode::ActiveZoneViolation,
                      "foot is " + fmt17(foot.boundary_distance) + " from the tunnel edge, margin " +
                          fmt17(options.delta_s));
  }
  const RayScan s = scan(tunnel, r, foot, cfg.alpha_e, cfg);
  DirectionEstimate est = combine_maxima(find_local_maxima(tunnel, s, cfg, options.angle_tol), s.frame, options.strict);
  est.alpha = cfg.alpha_e;
  est.foot = foot;
  return est;
}

ExactnessReport exactness(const DirectionEstimate& est, double floor) {
  ExactnessReport out;
  out.angle = line_angle(est.line_dir, est.frame.E_minus);
  out.alpha_e = est.alpha;
  out.useful = out.angle < floor;
  return out;
}

std::vector<SweepRow> alpha_sweep(const ParametricTunnel& tunnel, const std::vector<Vec3>& points,
                                  const std::vector<double>& alphas, const SensorConfig& cfg,
                                  const EstimatorOptions& options) {
  EstimatorOptions lenient = options;
  lenient.strict = false;

  // Feet do not depend on alpha.
  std::vector<std::optional<ProjectionResult>> feet(points.size());
  std::vector<std::string> foot_errors(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      ProjectionOptions popt = options.projection;
      popt.delta_s = 0.0;
      feet[i] = project(tunnel, points[i], popt);
    } catch (const TunnelError& e) {
      foot_errors[i] = e.what();
    }
  }

  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    SensorConfig c = cfg;
    c.alpha_e = alpha;
    c.alpha_s = std::max(cfg.alpha_s, alpha);
    SweepRow row;
    row.alpha = alpha;
    int well_posed = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double value = std::numeric_limits<double>::quiet_NaN();
      if (!feet[i]) {
        ++row.errors;
        row.messages.push_back(foot_errors[i]);
      } else {
        try {
          const DirectionEstimate est = mdpbe(tunnel, points[i], *feet[i], c, lenient);
          value = exactness(est).angle;
          row.max_exactness = std::max(row.max_exactness, value);
          if (est.well_posed) ++well_posed;
        } catch (const TunnelError& e) {
          ++row.errors;
          row.messages.push_back(e.what());
        }
      }
      row.exactness.push_back(value);
    }
    row.wellposed_rate = points.empty() ? 0.0 : static_cast<double>(well_posed) / static_cast<double>(points.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tunnelnav
