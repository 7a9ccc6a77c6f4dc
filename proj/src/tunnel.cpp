#include "tunnelnav/tunnel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "tunnelnav/errors.hpp"

namespace tunnelnav {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateChart: return "DegenerateChart";
    case ErrorCode::UmbilicPoint: return "UmbilicPoint";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::CollinearInput: return "CollinearInput";
    case ErrorCode::NonUniqueProjection: return "NonUniqueProjection";
    case ErrorCode::ProjectionOnBoundary: return "ProjectionOnBoundary";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::VanishingField: return "VanishingField";
    case ErrorCode::NoHit: return "NoHit";
    case ErrorCode::ScanRejected: return "ScanRejected";
    case ErrorCode::PatchEscape: return "PatchEscape";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::WellPosednessViolation: return "WellPosednessViolation";
    case ErrorCode::ActiveZoneViolation: return "ActiveZoneViolation";
    case ErrorCode::EstimatorFailure: return "EstimatorFailure";
    case ErrorCode::SurfaceContact: return "SurfaceContact";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

const char* to_string(TunnelKind kind) {
  switch (kind) {
    case TunnelKind::Cylinder: return "cylinder";
    case TunnelKind::Torus: return "torus";
    case TunnelKind::Revolution: return "surface_of_revolution";
    case TunnelKind::Warped: return "warped";
  }
  return "unknown";
}

const char* to_string(BasisType type) {
  switch (type) {
    case BasisType::Line: return "line";
    case BasisType::Circle: return "circle";
    case BasisType::Interval: return "interval";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// PolynomialWarp

Vec3 PolynomialWarp::apply(const Vec3& p) const {
  Vec3 out = offset + linear * p;
  for (int i = 0; i < 3; ++i) out[i] += p.dot(quadratic[i] * p);
  return out;
}

Mat3 PolynomialWarp::jacobian(const Vec3& p) const {
  Mat3 J = linear;
  for (int i = 0; i < 3; ++i) J.row(i) += ((quadratic[i] + quadratic[i].transpose()) * p).transpose();
  return J;
}

Vec3 PolynomialWarp::hessian(const Vec3& a, const Vec3& b) const {
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = a.dot((quadratic[i] + quadratic[i].transpose()) * b);
  return out;
}

Vec3 PolynomialWarp::inverse(const Vec3& p) const {
  Vec3 q = p;
  for (int it = 0; it < 50; ++it) {
    const Vec3 residual = apply(q) - p;
    if (residual.norm() < 1e-14 * (1.0 + p.norm())) break;
    q -= jacobian(q).partialPivLu().solve(residual);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Chart defaults

ChartBox Chart::scan_window(const Vec3&) const { return domain(); }
ChartBox Chart::audit_window() const { return domain(); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CylinderChart final : public Chart {
 public:
  CylinderChart(double R, double length) : R_(R), length_(length) {}

  TunnelKind kind() const override { return TunnelKind::Cylinder; }

  ChartJet jet(const Vec2& uv) const override {
    const double c = std::cos(uv[0]), s = std::sin(uv[0]);
    ChartJet j;
    j.X = {R_ * c, R_ * s, uv[1]};
    j.Xu = {-R_ * s, R_ * c, 0.0};
    j.Xv = {0.0, 0.0, 1.0};
    j.Xuu = {-R_ * c, -R_ * s, 0.0};
    j.Xuv = Vec3::Zero();
    j.Xvv = Vec3::Zero();
    return j;
  }

  BasisJet basis(const Vec2& uv) const override { return {uv[1], 0.0, 1.0}; }
  BasisType basis_type() const override {
    return std::isfinite(length_) ? BasisType::Interval : BasisType::Line;
  }
  ChartBox domain() const override {
    if (std::isfinite(length_)) return {{0.0, kTwoPi, true}, {0.0, length_, false}};
    return {{0.0, kTwoPi, true}, {-kInf, kInf, false}};
  }
  int orientation() const override { return -1; }
  double feature_size() const override { return R_; }

  ChartBox scan_window(const Vec3& r) const override {
    ChartBox box = domain();
    if (!std::isfinite(length_)) {
      // Any surface point farther than R + rho axially is beaten by the radial foot.
      const double w = 1.1 * R_ + std::hypot(r[0], r[1]);
      box.v = {r[2] - w, r[2] + w, false};
    }
    return box;
  }

  ChartBox audit_window() const override {
    ChartBox box = domain();
    if (!std::isfinite(length_)) box.v = {-R_, R_, false};
    return box;
  }

 private:
  double R_;
  double length_;
};

class TorusChart final : public Chart {
 public:
  TorusChart(double R, double r) : R_(R), r_(r) {}

  TunnelKind kind() const override { return TunnelKind::Torus; }

  ChartJet jet(const Vec2& uv) const override {
    const double cu = std::cos(uv[0]), su = std::sin(uv[0]);
    const double cv = std::cos(uv[1]), sv = std::sin(uv[1]);
    const double rho = R_ + r_ * cu;
    ChartJet j;
    j.X = {rho * cv, rho * sv, r_ * su};
    j.Xu = {-r_ * su * cv, -r_ * su * sv, r_ * cu};
    j.Xv = {-rho * sv, rho * cv, 0.0};
    j.Xuu = {-r_ * cu * cv, -r_ * cu * sv, -r_ * su};
    j.Xuv = {r_ * su * sv, -r_ * su * cv, 0.0};
    j.Xvv = {-rho * cv, -rho * sv, 0.0};
    return j;
  }

  BasisJet basis(const Vec2& uv) const override { return {uv[1], 0.0, 1.0}; }
  BasisType basis_type() const override { return BasisType::Circle; }
  ChartBox domain() const override { return {{0.0, kTwoPi, true}, {0.0, kTwoPi, true}}; }
  int orientation() const override { return 1; }
  double feature_size() const override { return r_; }

 private:
  double R_;
  double r_;
};

class RevolutionChart final : public Chart {
 public:
  RevolutionChart(std::vector<double> profile, double b_min, double b_max)
      : profile_(std::move(profile)), b_min_(b_min), b_max_(b_max) {
    min_radius_ = kInf;
    for (int i = 0; i <= 256; ++i) {
      const double z = b_min_ + (b_max_ - b_min_) * i / 256.0;
      min_radius_ = std::min(min_radius_, radius(z)[0]);
    }
  }

  TunnelKind kind() const override { return TunnelKind::Revolution; }

  ChartJet jet(const Vec2& uv) const override {
    const Eigen::Vector3d f = radius(uv[1]);
    const double c = std::cos(uv[0]), s = std::sin(uv[0]);
    ChartJet j;
    j.X = {f[0] * c, f[0] * s, uv[1]};
    j.Xu = {-f[0] * s, f[0] * c, 0.0};
    j.Xv = {f[1] * c, f[1] * s, 1.0};
    j.Xuu = {-f[0] * c, -f[0] * s, 0.0};
    j.Xuv = {-f[1] * s, f[1] * c, 0.0};
    j.Xvv = {f[2] * c, f[2] * s, 0.0};
    return j;
  }

  BasisJet basis(const Vec2& uv) const override { return {uv[1], 0.0, 1.0}; }
  BasisType basis_type() const override { return BasisType::Interval; }
  ChartBox domain() const override { return {{0.0, kTwoPi, true}, {b_min_, b_max_, false}}; }
  int orientation() const override { return -1; }
  double feature_size() const override { return min_radius_; }

 private:
  // (f, f', f'') by Horner's scheme.
  Eigen::Vector3d radius(double z) const {
    double f = 0.0, df = 0.0, ddf = 0.0;
    for (auto it = profile_.rbegin(); it != profile_.rend(); ++it) {
      ddf = ddf * z + 2.0 * df;
      df = df * z + f;
      f = f * z + *it;
    }
    return {f, df, ddf};
  }

  std::vector<double> profile_;
  double b_min_;
  double b_max_;
  double min_radius_;
};

class WarpedChart final : public Chart {
 public:
  WarpedChart(ParametricTunnel base, PolynomialWarp warp) : base_(std::move(base)), warp_(warp) {
    const ChartBox box = base_.audit_window();
    const Vec2 mid{0.5 * (box.u.lo + box.u.hi), 0.5 * (box.v.lo + box.v.hi)};
    const double det = warp_.jacobian(base_.point(mid)).determinant();
    if (!(std::abs(det) > 0.0)) {
      throw TunnelError(ErrorCode::InvalidArgument, "warp is singular at the chart centre");
    }
    orientation_ = det > 0.0 ? base_.orientation() : -base_.orientation();
  }

  TunnelKind kind() const override { return TunnelKind::Warped; }

  ChartJet jet(const Vec2& uv) const override {
    const ChartJet b = base_.jet(uv);
    const Mat3 J = warp_.jacobian(b.X);
    ChartJet j;
    j.X = warp_.apply(b.X);
    j.Xu = J * b.Xu;
    j.Xv = J * b.Xv;
    j.Xuu = J * b.Xuu + warp_.hessian(b.Xu, b.Xu);
    j.Xuv = J * b.Xuv + warp_.hessian(b.Xu, b.Xv);
    j.Xvv = J * b.Xvv + warp_.hessian(b.Xv, b.Xv);
    return j;
  }

  Vec3 point(const Vec2& uv) const override { return warp_.apply(base_.point(uv)); }
  BasisJet basis(const Vec2& uv) const override { return base_.basis(uv); }
  BasisType basis_type() const override { return base_.basis_type(); }
  ChartBox domain() const override { return base_.domain(); }
  int orientation() const override { return orientation_; }
  double feature_size() const override { return base_.feature_size(); }

  ChartBox scan_window(const Vec3& r) const override {
    ChartBox box = base_.scan_window(warp_.inverse(r));
    for (AxisRange* axis : {&box.u, &box.v}) {
      if (axis->periodic || !std::isfinite(axis->span())) continue;
      const ChartBox dom = base_.domain();
      const AxisRange& limit = axis == &box.u ? dom.u : dom.v;
      const double pad = 0.25 * axis->span();
      axis->lo = std::max(limit.lo, axis->lo - pad);
      axis->hi = std::min(limit.hi, axis->hi + pad);
    }
    return box;
  }

  ChartBox audit_window() const override { return base_.audit_window(); }

 private:
  ParametricTunnel base_;
  PolynomialWarp warp_;
  int orientation_ = 1;
};

void require(bool ok, const char* what) {
  if (!ok) throw TunnelError(ErrorCode::InvalidArgument, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// ParametricTunnel

ParametricTunnel::ParametricTunnel(std::shared_ptr<const Chart> chart) : chart_(std::move(chart)) {
  require(chart_ != nullptr, "tunnel chart must not be null");
}

ParametricTunnel ParametricTunnel::cylinder(double R, double length) {
  require(R > 0.0, "cylinder radius must be positive");
  require(length > 0.0, "cylinder length must be positive");
  return ParametricTunnel(std::make_shared<CylinderChart>(R, length));
}

ParametricTunnel ParametricTunnel::torus(double R, double r) {
  require(r > 0.0 && R > r, "torus requires R > r > 0");
  return ParametricTunnel(std::make_shared<TorusChart>(R, r));
}

ParametricTunnel ParametricTunnel::revolution(std::vector<double> profile, double b_min, double b_max) {
  require(!profile.empty(), "revolution profile needs at least one coefficient");
  require(b_min < b_max, "revolution basis interval must be non-empty");
  auto chart = std::make_shared<RevolutionChart>(std::move(profile), b_min, b_max);
  require(chart->feature_size() > 0.0, "revolution profile must stay positive on the basis interval");
  return ParametricTunnel(std::move(chart));
}

ParametricTunnel ParametricTunnel::warped(const ParametricTunnel& base, const PolynomialWarp& warp) {
  return ParametricTunnel(std::make_shared<WarpedChart>(base, warp));
}

Vec2 ParametricTunnel::normalize(const Vec2& uv) const {
  const ChartBox box = domain();
  Vec2 out = uv;
  const AxisRange* axes[2] = {&box.u, &box.v};
  for (int i = 0; i < 2; ++i) {
    const AxisRange& a = *axes[i];
    if (a.periodic) {
      double w = std::fmod(out[i] - a.lo, a.span());
      if (w < 0.0) w += a.span();
      out[i] = a.lo + w;
    } else {
      out[i] = std::clamp(out[i], a.lo, a.hi);
    }
  }
  return out;
}

bool ParametricTunnel::contains(const Vec2& uv) const {
  const ChartBox box = domain();
  const AxisRange* axes[2] = {&box.u, &box.v};
  for (int i = 0; i < 2; ++i) {
    if (!std::isfinite(uv[i])) return false;
    if (!axes[i]->periodic && (uv[i] < axes[i]->lo || uv[i] > axes[i]->hi)) return false;
  }
  return true;
}

}  // namespace tunnelnav
