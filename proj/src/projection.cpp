#include "tunnelnav/projection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tunnelnav/format.hpp"

namespace tunnelnav {

namespace {

struct Lattice {
  std::vector<double> us, vs;
  bool wrap_u = false, wrap_v = false;
};

std::vector<double> samples(const AxisRange& a, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a.periodic ? a.lo + a.span() * i / n : a.lo + a.span() * i / (n - 1);
  return out;
}

Lattice make_lattice(const ChartBox& box, int n) {
  // A periodic axis in a scan window always spans its full period.
  return {samples(box.u, n), samples(box.v, n), box.u.periodic, box.v.periodic};
}

struct Candidate {
  Vec2 uv;
  double d2;
};

// Lattice points whose squared distance does not exceed any of their 8 neighbours.
std::vector<Candidate> lattice_minima(const ParametricTunnel& tunnel, const Vec3& r, const Lattice& lat) {
  const int nu = static_cast<int>(lat.us.size());
  const int nv = static_cast<int>(lat.vs.size());
  std::vector<double> d2(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) d2[i * nv + j] = (tunnel.point({lat.us[i], lat.vs[j]}) - r).squaredNorm();
  }
  std::vector<Candidate> out;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double here = d2[i * nv + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          int a = i + di, b = j + dj;
          if (a < 0 || a >= nu) {
            if (!lat.wrap_u) continue;
            a = (a + nu) % nu;
          }
          if (b < 0 || b >= nv) {
            if (!lat.wrap_v) continue;
            b = (b + nv) % nv;
          }
          if (d2[a * nv + b] < here) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) out.push_back({{lat.us[i], lat.vs[j]}, here});
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) { return x.d2 < y.d2; });
  return out;
}

// Derivative-free pattern search on a shrinking 5x5 stencil.
Vec2 zoom_refine(const ParametricTunnel& tunnel, const Vec3& r, Vec2 uv, Vec2 h) {
  double best = (tunnel.point(uv) - r).squaredNorm();
  while (h.maxCoeff() > 1e-14) {
    Vec2 next = uv;
    for (int a = -2; a <= 2; ++a) {
      for (int b = -2; b <= 2; ++b) {
        const Vec2 trial = tunnel.normalize(uv + Vec2(a * h[0], b * h[1]));
        const double d2 = (tunnel.point(trial) - r).squaredNorm();
        if (d2 < best) {
          best = d2;
          next = trial;
        }
      }
    }
    if (next == uv) h *= 0.5;
    uv = next;
  }
  return uv;
}

ProjectionResult finish(const ParametricTunnel& tunnel, const Vec3& r, const Vec2& uv) {
  ProjectionResult out;
  out.foot_uv = tunnel.normalize(uv);
  out.foot_point = tunnel.point(out.foot_uv);
  const Vec3 diff = out.foot_point - r;
  out.distance = diff.norm();
  out.direction = diff / out.distance;
  return out;
}

}  // namespace

BoundaryProjection::BoundaryProjection(const ProjectionResult& result)
    : TunnelError(ErrorCode::ProjectionOnBoundary,
                  "foot is within delta_s of the tunnel edge (edge distance " + fmt17(result.boundary_distance) + ")"),
      result_(result) {}

LocalProjection project_local(const ParametricTunnel& tunnel, const Vec3& r, const Vec2& seed) {
  const ChartBox box = tunnel.domain();
  const AxisRange* axes[2] = {&box.u, &box.v};
  LocalProjection out;
  Vec2 uv = tunnel.normalize(seed);

  for (int it = 0; it < 100; ++it) {
    const ChartJet j = tunnel.jet(uv);
    const Vec3 diff = j.X - r;
    const Vec2 g(diff.dot(j.Xu), diff.dot(j.Xv));
    Mat2 H;
    H << j.Xu.dot(j.Xu) + diff.dot(j.Xuu), j.Xu.dot(j.Xv) + diff.dot(j.Xuv), j.Xu.dot(j.Xv) + diff.dot(j.Xuv),
        j.Xv.dot(j.Xv) + diff.dot(j.Xvv);
    Mat2 G;
    G << j.Xu.dot(j.Xu), j.Xu.dot(j.Xv), j.Xu.dot(j.Xv), j.Xv.dot(j.Xv);
    const Mat2& M = (H(0, 0) > 0.0 && H.determinant() > 0.0) ? H : G;

    // Active set: bounded coordinates resting on an edge with an outward step are frozen.
    Vec2 step = -M.inverse() * g;
    bool frozen[2] = {false, false};
    for (int k = 0; k < 2; ++k) {
      const AxisRange& a = *axes[k];
      if (a.periodic) continue;
      if ((uv[k] <= a.lo && step[k] < 0.0) || (uv[k] >= a.hi && step[k] > 0.0)) frozen[k] = true;
    }
    if (frozen[0] || frozen[1]) {
      step.setZero();
      for (int k = 0; k < 2; ++k) {
        if (!frozen[k] && M(k, k) > 0.0) step[k] = -g[k] / M(k, k);
      }
    }
    out.on_edge = frozen[0] || frozen[1];

    const double f0 = diff.squaredNorm();
    double t = 1.0;
    Vec2 trial = tunnel.normalize(uv + step);
    for (int ls = 0; ls < 40; ++ls) {
      if ((tunnel.point(trial) - r).squaredNorm() <= f0 + 1e-15 * (1.0 + f0)) break;
      t *= 0.5;
      trial = tunnel.normalize(uv + t * step);
    }
    const double moved = (t * step).norm();
    uv = trial;
    if (moved <= 1e-15 * (1.0 + uv.norm())) {
      out.converged = true;
      break;
    }
  }
  out.uv = uv;
  out.foot = tunnel.point(uv);
  // An edge-resting iterate is a constrained minimum, not a foot of a normal.
  if (out.on_edge) {
    const ChartJet j = tunnel.jet(uv);
    const Vec3 diff = out.foot - r;
    const double scale = diff.norm() * std::max(j.Xu.norm(), j.Xv.norm()) + 1e-300;
    out.on_edge = std::abs(diff.dot(j.Xu)) > 1e-8 * scale || std::abs(diff.dot(j.Xv)) > 1e-8 * scale;
  }
  return out;
}

double distance_to_boundary(const ParametricTunnel& tunnel, const Vec2& uv) {
  if (!tunnel.is_open()) return std::numeric_limits<double>::infinity();
  const ChartBox box = tunnel.domain();
  const Vec3 p = tunnel.point(uv);
  double best = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 64;
  for (double vb : {box.v.lo, box.v.hi}) {
    auto dist = [&](double u) { return (tunnel.point({u, vb}) - p).norm(); };
    double u_best = uv[0];
    double d_best = dist(u_best);
    for (int i = 0; i < kSamples; ++i) {
      const double u = box.u.lo + box.u.span() * i / kSamples;
      const double d = dist(u);
      if (d < d_best) {
        d_best = d;
        u_best = u;
      }
    }
    // Golden-section polish on the bracketing cell.
    const double h = box.u.span() / kSamples;
    double a = u_best - h, b = u_best + h;
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = dist(x1), f2 = dist(x2);
    while (b - a > 1e-12) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = dist(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = dist(x2);
      }
    }
    best = std::min({best, d_best, dist(0.5 * (a + b))});
  }
  return best;
}

ProjectionResult project(const ParametricTunnel& tunnel, const Vec3& r, const ProjectionOptions& options) {
  if (options.grid < 4) throw TunnelError(ErrorCode::InvalidArgument, "projection grid must be at least 4");
  const ChartBox box = tunnel.scan_window(r);
  const int n = options.oracle ? options.oracle_grid : options.grid;
  const Lattice lat = make_lattice(box, n);
  const std::vector<Candidate> minima = lattice_minima(tunnel, r, lat);
  if (minima.empty()) throw TunnelError(ErrorCode::InvalidArgument, "projection lattice produced no candidates");

  const Vec2 cell(box.u.span() / n, box.v.span() / n);
  struct Solution {
    Vec2 uv;
    Vec3 foot;
    double distance;
  };
  std::vector<Solution> solutions;
  const int count = std::min<int>(options.max_candidates, static_cast<int>(minima.size()));
  for (int k = 0; k < count; ++k) {
    Vec2 uv;
    if (options.oracle) {
      uv = zoom_refine(tunnel, r, minima[k].uv, cell);
    } else {
      uv = project_local(tunnel, r, minima[k].uv).uv;
    }
    const Vec3 foot = tunnel.point(uv);
    solutions.push_back({uv, foot, (foot - r).norm()});
  }
  std::sort(solutions.begin(), solutions.end(),
            [](const Solution& a, const Solution& b) { return a.distance < b.distance; });

  ProjectionResult out = finish(tunnel, r, solutions.front().uv);
  if (!(out.distance > 1e-12)) {
    throw TunnelError(ErrorCode::InvalidArgument, "query point lies on the surface");
  }
  const double same_foot = 1e-6 * tunnel.feature_size();
  for (std::size_t k = 1; k < solutions.size(); ++k) {
    if ((solutions[k].foot - solutions.front().foot).norm() > same_foot) {
      out.uniqueness_gap = solutions[k].distance - solutions.front().distance;
      break;
    }
  }
  if (out.uniqueness_gap < options.uniqueness_tol * (1.0 + out.distance)) {
    throw TunnelError(ErrorCode::NonUniqueProjection,
                      "nearest point is not unique (basin gap " + fmt17(out.uniqueness_gap) + ") for r=(" +
                          fmt17(r[0]) + ", " + fmt17(r[1]) + ", " + fmt17(r[2]) + ")");
  }
  out.boundary_distance = distance_to_boundary(tunnel, out.foot_uv);
  if (options.delta_s > 0.0 && out.boundary_distance < options.delta_s) throw BoundaryProjection(out);
  return out;
}

}  // namespace tunnelnav
