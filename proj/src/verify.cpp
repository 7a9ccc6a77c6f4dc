#include "tunnelnav/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "tunnelnav/audit.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/estimator.hpp"
#include "tunnelnav/format.hpp"
#include "tunnelnav/frame.hpp"
#include "tunnelnav/offset.hpp"
#include "tunnelnav/projection.hpp"
#include "tunnelnav/sensor.hpp"

namespace tunnelnav {

namespace {

constexpr double kTorusR = 2.0;
constexpr double kTorusr = 0.5;
constexpr double kTorusDPlus = 0.4;
constexpr double kTorusDStar = 0.25;
constexpr double kCylinderDPlus = 0.8;
constexpr double kCylinderDStar = 0.5;

struct Fixture {
  std::string label;
  ParametricTunnel tunnel;
  double d_plus;
  double d_star;
};

std::vector<Fixture> fixtures() {
  return {{"cylinder", ParametricTunnel::cylinder(1.0), kCylinderDPlus, kCylinderDStar},
          {"torus", ParametricTunnel::torus(kTorusR, kTorusr), kTorusDPlus, kTorusDStar}};
}

RegularityAudit audit_of(const Fixture& f, int grid = 64) {
  AuditConfig cfg;
  cfg.grid = grid;
  cfg.d_plus = f.d_plus;
  cfg.d_star = f.d_star;
  return regularity_audit(f.tunnel, cfg);
}

std::string at_uv(const Vec2& uv) { return "(u,v)=(" + fmt17(uv[0]) + ", " + fmt17(uv[1]) + ")"; }

struct Outcome {
  long cases = 0;
  std::string failure;
  bool fail(const std::string& what) {
    if (failure.empty()) failure = what;
    return false;
  }
};

Vec2 random_uv(const ParametricTunnel& t, std::mt19937_64& rng) {
  const ChartBox box = t.audit_window();
  std::uniform_real_distribution<double> uu(box.u.lo, box.u.hi), vv(box.v.lo, box.v.hi);
  return {uu(rng), vv(rng)};
}

Outcome principal_curvatures(std::uint64_t) {
  Outcome o;
  const ParametricTunnel torus = ParametricTunnel::torus(kTorusR, kTorusr);
  constexpr int n = 100;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 uv(kTwoPi * i / n, kTwoPi * j / n);
      const ShapeFrame f = surface_frame(torus, uv);
      const double km = std::cos(uv[0]) / (kTorusR + kTorusr * std::cos(uv[0]));
      ++o.cases;
      if (std::abs(f.kappa_minus - km) > 1e-9 || std::abs(f.kappa_plus - 1.0 / kTorusr) > 1e-9) {
        o.fail("torus principal curvature off the closed form at " + at_uv(uv));
      }
    }
  }
  return o;
}

Outcome regularity_certificates(std::uint64_t) {
  Outcome o;
  const auto fx = fixtures();
  const double expect_tau[2] = {1.0, 1.0 / kTorusr - 1.0 / (kTorusR + kTorusr)};
  const double expect_kappa[2] = {1.0 - kCylinderDPlus, 1.0 - kTorusDPlus / kTorusr};
  const double tol[2] = {1e-9, 1e-6};
  for (int k = 0; k < 2; ++k) {
    const TunnelConstants c = audit_of(fx[k]).constants;
    ++o.cases;
    if (std::abs(c.delta_tau - expect_tau[k]) > tol[k]) {
      o.fail(fx[k].label + " delta_tau = " + fmt17(c.delta_tau) + ", expected " + fmt17(expect_tau[k]));
    }
    if (std::abs(c.delta_kappa - expect_kappa[k]) > tol[k]) {
      o.fail(fx[k].label + " delta_kappa = " + fmt17(c.delta_kappa) + ", expected " + fmt17(expect_kappa[k]));
    }
  }
  return o;
}

Outcome angle_scaling(std::uint64_t seed) {
  Outcome o;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logq(std::log(0.05), std::log(20.0)), ang(0.0, kTwoPi);
  while (o.cases < 100000) {
    const double q1 = std::exp(logq(rng)), q2 = std::exp(logq(rng)), th = ang(rng);
    const Eigen::Rotation2Dd rot(th);
    const Mat2 Q = rot.toRotationMatrix() * Vec2(q1, q2).asDiagonal() * rot.toRotationMatrix().transpose();
    const double a = ang(rng), b = ang(rng);
    if (std::abs(std::sin(b - a)) < 1e-6) continue;
    const Vec2 A(std::cos(a), std::sin(a)), B(std::cos(b), std::sin(b));
    const double zeta = sine_angle_scaling(Q, A, B);
    const double qm = std::min(q1, q2), qp = std::max(q1, q2);
    ++o.cases;
    if (zeta < qm / qp - 1e-9 || zeta > qp / qm + 1e-9) {
      o.fail("sine ratio " + fmt17(zeta) + " outside [" + fmt17(qm / qp) + ", " + fmt17(qp / qm) + "] in case " +
             std::to_string(o.cases));
    }
  }
  return o;
}

Outcome offset_roundtrip(std::uint64_t seed) {
  Outcome o;
  std::mt19937_64 rng(seed);
  const ParametricTunnel torus = ParametricTunnel::torus(kTorusR, kTorusr);
  std::uniform_real_distribution<double> dd(0.0, kTorusDPlus);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 uv = random_uv(torus, rng);
    double d = dd(rng);
    if (d <= 1e-3) d = 1e-3;
    const Vec3 p = offset_point(torus, d, uv, kTorusDPlus);
    const ProjectionResult pr = project(torus, p);
    ++o.cases;
    if (std::abs(pr.distance - d) > 1e-6 || (pr.foot_point - torus.point(uv)).norm() > 1e-6) {
      o.fail("projection of the offset point does not recover (d, foot) at " + at_uv(uv) + ", d=" + fmt17(d));
    }
  }
  return o;
}

Outcome differential_norms(std::uint64_t) {
  Outcome o;
  for (const Fixture& f : fixtures()) {
    const RegularityAudit a = audit_of(f);
    const OffsetSurface off(f.tunnel, f.d_star);
    for (const Vec2& uv : audit_grid(f.tunnel, 64)) {
      const auto norms = off.differential_norms(uv);
      ++o.cases;
      if (norms[0] > 1.0 + f.d_star * a.constants.L_N + 1e-6) {
        o.fail(f.label + " offset differential norm above 1 + d* L_N at " + at_uv(uv));
      }
      if (norms[1] > 1.0 / a.constants.delta_kappa + 1e-6) {
        o.fail(f.label + " inverse differential norm above 1/delta_kappa at " + at_uv(uv));
      }
    }
  }
  return o;
}

Outcome patch_bounds(std::uint64_t seed) {
  Outcome o;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const Fixture& f : fixtures()) {
    const TunnelConstants c = audit_of(f).constants;
    SensorConfig cfg;
    cfg.patch_radius_eta = c.eta;
    const double L = c.L_N;
    for (int k = 0; k < 500; ++k) {
      const Vec2 uv = random_uv(f.tunnel, rng);
      const ShapeFrame fr = surface_frame(f.tunnel, uv);
      const double rho = c.eta * std::max(unit(rng), 1e-3);
      const double psi = kTwoPi * unit(rng);
      const Vec3 p = fr.point + rho * (std::cos(psi) * fr.ortho_basis[0] + std::sin(psi) * fr.ortho_basis[1]);
      const double g = patch_height(f.tunnel, uv, p, cfg);
      const double grad = patch_gradient(f.tunnel, uv, p, cfg).norm();
      const double lift = (p + g * fr.N - fr.point).norm();
      ++o.cases;
      if (std::abs(g) > L * rho * rho) o.fail(f.label + " patch height above L_N rho^2 at " + at_uv(uv));
      if (grad > 2.0 * L * rho + 1e-8) o.fail(f.label + " patch gradient above 2 L_N rho at " + at_uv(uv));
      if (lift > rho + L * rho * rho) o.fail(f.label + " patch lift above rho + L_N rho^2 at " + at_uv(uv));
    }
  }
  return o;
}

Outcome quadratic_remainder_decay(std::uint64_t seed) {
  Outcome o;
  std::mt19937_64 rng(seed);
  for (const Fixture& f : fixtures()) {
    const TunnelConstants c = audit_of(f).constants;
    SensorConfig cfg;
    cfg.patch_radius_eta = c.eta;
    std::vector<Vec2> centres;
    for (int k = 0; k < 20; ++k) centres.push_back(random_uv(f.tunnel, rng));
    double previous = std::numeric_limits<double>::infinity();
    for (double scale : {0.2, 0.1, 0.05}) {
      const double rho = scale * c.eta;
      double worst = 0.0;
      for (const Vec2& uv : centres) {
        const ShapeFrame fr = surface_frame(f.tunnel, uv);
        for (int k = 0; k < 16; ++k) {
          const double psi = kTwoPi * k / 16;
          const Vec3 p = fr.point + rho * (std::cos(psi) * fr.ortho_basis[0] + std::sin(psi) * fr.ortho_basis[1]);
          worst = std::max(worst, std::abs(quadratic_remainder(f.tunnel, uv, p, cfg)) / (rho * rho));
          ++o.cases;
        }
      }
      if (worst > previous) o.fail(f.label + " remainder ratio grew from " + fmt17(previous) + " to " + fmt17(worst));
      previous = worst;
    }
    if (previous > 0.1 * c.L_N) o.fail(f.label + " final remainder ratio " + fmt17(previous) + " above 0.1 L_N");
  }
  return o;
}

double limit_error(const ParametricTunnel& tunnel, const Vec3& r, double alpha, int n_phi) {
  SensorConfig cfg;
  cfg.alpha_s = 0.4;
  cfg.alpha_e = std::min(alpha, 0.4);
  cfg.n_phi = n_phi;
  const RayScan s = scan(tunnel, r, alpha, cfg);
  const std::vector<double> x = scaled_depth_profile(s);
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::isfinite(x[k])) worst = std::max(worst, std::abs(x[k] - limit_depth(s.frame, s.center.distance, s.phis[k])));
  }
  return worst;
}

Outcome small_cone_limit(std::uint64_t) {
  Outcome o;
  const ParametricTunnel torus = ParametricTunnel::torus(kTorusR, kTorusr);
  const double alphas[] = {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};
  for (double u : {0.0, kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0, kPi}) {
    const ShapeFrame f = surface_frame(torus, {u, 0.7});
    const Vec3 r = f.point + 0.3 * f.N;
    double previous = std::numeric_limits<double>::infinity();
    for (double a : alphas) {
      const double err = limit_error(torus, r, a, 64);
      ++o.cases;
      if (err > 0.6 * previous + 1e-6) {
        o.fail("scaled depth error did not shrink at alpha=" + fmt17(a) + ", u=" + fmt17(u));
      }
      previous = err;
    }
    if (previous > 5e-3) o.fail("scaled depth error " + fmt17(previous) + " above 5e-3 at u=" + fmt17(u));
  }
  return o;
}

Outcome meridian_angle_floor(std::uint64_t) {
  Outcome o;
  for (const Fixture& f : fixtures()) {
    const TunnelConstants c = audit_of(f).constants;
    const double floor = c.theta_floor();
    for (const Vec2& uv : audit_grid(f.tunnel, 64)) {
      const ShapeFrame fr = surface_frame(f.tunnel, uv);
      ++o.cases;
      if (line_angle(fr.E_minus, fr.tau) < floor - 1e-12) {
        o.fail(f.label + " angle between E- and the meridian below its floor at " + at_uv(uv));
      }
    }
  }
  return o;
}

Outcome angle_rate(std::uint64_t seed) {
  Outcome o;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const ParametricTunnel torus = ParametricTunnel::torus(kTorusR, kTorusr);
  const OffsetSurface off(torus, kTorusDStar);
  for (int k = 0; k < 100; ++k) {
    const Vec2 uv0 = random_uv(torus, rng);
    const Vec2 w(sym(rng), sym(rng));
    const double a1 = sym(rng), a2 = sym(rng), b1 = sym(rng), b2 = sym(rng);
    if (std::abs(a1 * b2 - a2 * b1) < 0.05) {
      --k;
      continue;
    }
    const ChartCurve motion = [=](double t) { return Vec2(uv0 + t * w); };
    const TangentField V = [&, a1, a2](const Vec2& uv) {
      const OffsetFrame f = offset_frame(off, uv);
      return Vec3(a1 * f.tangent_basis[0] + a2 * f.tangent_basis[1]);
    };
    const TangentField W = [&, b1, b2](const Vec2& uv) {
      const OffsetFrame f = offset_frame(off, uv);
      return Vec3(b1 * f.tangent_basis[0] + b2 * f.tangent_basis[1]);
    };
    const double res = angle_rate_residual(off, motion, V, W, 0.0, 1e-5);
    ++o.cases;
    if (!(res <= 1e-4)) o.fail("angle rate residual " + fmt17(res) + " at " + at_uv(uv0));
  }
  return o;
}

// Largest singular value of V -> nabla_V tau* over an n x n chart grid.
double offset_meridian_rate(const OffsetSurface& off, int n) {
  double worst = 0.0;
  for (const Vec2& uv : audit_grid(off.base(), n)) {
    const OffsetFrame f = offset_frame(off, uv);
    const Vec3 ref = f.tau_star;
    const TangentField tau = [&](const Vec2& q) { return align_sign(offset_frame(off, q).tau_star, ref); };
    const Vec3 e1 = f.tangent_basis[0].normalized();
    const Vec3 e2 = f.N_star.cross(e1);
    Eigen::Matrix<double, 3, 2> M;
    M.col(0) = covariant_derivative(off, tau, uv, e1);
    M.col(1) = covariant_derivative(off, tau, uv, e2);
    worst = std::max(worst, Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>>(M).singularValues()[0]);
  }
  return worst;
}

Outcome offset_meridian_lipschitz(std::uint64_t) {
  Outcome o;
  const OffsetSurface off(ParametricTunnel::torus(kTorusR, kTorusr), kTorusDStar);
  const double coarse = offset_meridian_rate(off, 32);
  const double fine = offset_meridian_rate(off, 64);
  o.cases = 32 * 32 + 64 * 64;
  if (!std::isfinite(coarse) || !std::isfinite(fine)) o.fail("offset meridian derivative is not finite");
  if (fine > 1.1 * coarse) o.fail("refined rate " + fmt17(fine) + " exceeds coarse " + fmt17(coarse) + " by >10%");
  return o;
}

Outcome estimator_symmetry(std::uint64_t) {
  Outcome o;
  const ParametricTunnel cyl = ParametricTunnel::cylinder(1.0);
  SensorConfig cfg;
  cfg.n_phi = 64;
  const std::vector<Vec3> points = {{0.5, 0.0, 0.0}, {0.0, -0.4, 1.3}, {0.3, 0.3, -2.0}};
  for (const SweepRow& row : alpha_sweep(cyl, points, {0.4, 0.2, 0.1}, cfg)) {
    o.cases += static_cast<long>(points.size());
    if (row.errors > 0) o.fail("cylinder estimate failed at alpha=" + fmt17(row.alpha) + ": " + row.messages.front());
    if (row.max_exactness > 1e-6) o.fail("cylinder exactness " + fmt17(row.max_exactness) + " at alpha=" + fmt17(row.alpha));
  }
  return o;
}

Outcome estimator_wellposed(std::uint64_t) {
  Outcome o;
  const ParametricTunnel torus = ParametricTunnel::torus(kTorusR, kTorusr);
  SensorConfig cfg;
  cfg.n_phi = 64;
  std::vector<Vec3> points;
  for (double u : {0.0, kPi / 2.0, kPi, 1.2}) {
    const ShapeFrame f = surface_frame(torus, {u, 0.3});
    points.push_back(f.point + 0.3 * f.N);
  }
  for (const SweepRow& row : alpha_sweep(torus, points, {0.1, 0.05}, cfg)) {
    o.cases += static_cast<long>(points.size());
    if (row.errors > 0 || row.wellposed_rate < 1.0) {
      o.fail("torus estimate without two maxima at alpha=" + fmt17(row.alpha));
    }
  }
  return o;
}

using Suite = std::function<Outcome(std::uint64_t)>;

const std::vector<std::pair<std::string, Suite>>& registry() {
  static const std::vector<std::pair<std::string, Suite>> suites = {
      {"principal-curvatures", principal_curvatures},
      {"regularity-certificates", regularity_certificates},
      {"angle-scaling", angle_scaling},
      {"offset-roundtrip", offset_roundtrip},
      {"differential-norms", differential_norms},
      {"patch-bounds", patch_bounds},
      {"quadratic-remainder", quadratic_remainder_decay},
      {"small-cone-limit", small_cone_limit},
      {"meridian-angle-floor", meridian_angle_floor},
      {"angle-rate", angle_rate},
      {"offset-meridian-lipschitz", offset_meridian_lipschitz},
      {"estimator-symmetry", estimator_symmetry},
      {"estimator-wellposed", estimator_wellposed},
  };
  return suites;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, suite] : registry()) out.push_back(name);
  return out;
}

CheckResult run_verify_suite(const std::string& name, std::uint64_t seed) {
  for (const auto& [key, suite] : registry()) {
    if (key != name) continue;
    CheckResult res;
    res.name = name;
    try {
      const Outcome o = suite(seed);
      res.cases = o.cases;
      res.passed = o.failure.empty();
      res.detail = o.failure;
    } catch (const TunnelError& e) {
      res.passed = false;
      res.detail = e.what();
    }
    return res;
  }
  throw TunnelError(ErrorCode::InvalidArgument, "unknown verify suite '" + name + "'");
}

std::string format_check(const CheckResult& r) {
  if (r.passed) return r.name + ": PASS (" + std::to_string(r.cases) + " cases)";
  return r.name + ": FAIL (" + r.detail + ")";
}

}  // namespace tunnelnav
