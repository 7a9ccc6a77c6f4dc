#include "tunnelnav/offset.hpp"

#include <cmath>
#include <utility>

#include "tunnelnav/errors.hpp"
#include "tunnelnav/format.hpp"

namespace tunnelnav {

Vec3 offset_point(const ParametricTunnel& tunnel, double d, const Vec2& uv, double d_plus, double eps) {
  if (!(d < d_plus) || !(d > -eps || d == 0.0)) {
    throw TunnelError(ErrorCode::OffsetOutOfRange,
                      "offset " + fmt17(d) + " outside (" + fmt17(-eps) + ", " + fmt17(d_plus) + ")");
  }
  const ShapeFrame f = surface_frame(tunnel, uv);
  return f.point + d * f.N;
}

OffsetSurface::OffsetSurface(ParametricTunnel base, double d_star) : base_(std::move(base)), d_star_(d_star) {
  if (!(d_star > 0.0)) throw TunnelError(ErrorCode::InvalidArgument, "offset clearance d* must be positive");
}

Vec3 OffsetSurface::point(const Vec2& uv) const {
  const ShapeFrame f = surface_frame(base_, uv);
  return f.point + d_star_ * f.N;
}

Mat3 OffsetSurface::differential(const ShapeFrame& frame) const {
  Eigen::Matrix<double, 3, 2> P;
  P.col(0) = frame.ortho_basis[0];
  P.col(1) = frame.ortho_basis[1];
  return P * (Mat2::Identity() - d_star_ * frame.shape_op) * P.transpose();
}

std::array<double, 2> OffsetSurface::differential_norms(const Vec2& uv) const {
  const ShapeFrame f = surface_frame(base_, uv);
  // Id - d* S is symmetric with eigenvalues 1 - d* kappa_-+.
  const double a = std::abs(1.0 - d_star_ * f.kappa_minus);
  const double b = std::abs(1.0 - d_star_ * f.kappa_plus);
  return {std::max(a, b), 1.0 / std::min(a, b)};
}

OffsetFrame offset_frame(const OffsetSurface& offset, const Vec2& uv, FrameContinuity* continuity) {
  const ShapeFrame f = surface_frame(offset.base(), uv, continuity);
  const Mat3 J = offset.differential(f);
  OffsetFrame out;
  out.point = f.point + offset.d_star() * f.N;
  out.N_star = f.N;
  out.tangent_basis = {J * f.tangent_basis[0], J * f.tangent_basis[1]};
  const Vec3 stretched = J * f.tau;
  out.stretch = stretched.norm();
  out.tau_star = stretched / out.stretch;
  return out;
}

namespace {

Vec3 tangential(const Vec3& x, const Vec3& normal) { return x - x.dot(normal) * normal; }

Vec3 perp_part(const Vec3& x, const Vec3& axis) { return x - x.dot(axis) / axis.squaredNorm() * axis; }

}  // namespace

Vec3 covariant_derivative(const OffsetSurface& offset, const TangentField& field, const Vec2& uv, const Vec3& V,
                          double step) {
  if (!(step >= 1e-12)) throw TunnelError(ErrorCode::StepUnderflow, "finite-difference step below 1e-12");
  const double speed = V.norm();
  const OffsetFrame f = offset_frame(offset, uv);
  if (speed == 0.0) return Vec3::Zero();

  // Chart velocity c with J_u c_u + J_v c_v = V.
  Eigen::Matrix<double, 3, 2> T;
  T.col(0) = f.tangent_basis[0];
  T.col(1) = f.tangent_basis[1];
  const Vec2 c = (T.transpose() * T).ldlt().solve(T.transpose() * V);

  const double h = step / speed;
  const Vec3 forward = field(uv + h * c);
  const Vec3 backward = field(uv - h * c);
  return tangential((forward - backward) / (2.0 * h), f.N_star);
}

double angle_rate_residual(const OffsetSurface& offset, const ChartCurve& motion, const TangentField& V,
                           const TangentField& W, double t, double step) {
  if (!(step >= 1e-12)) throw TunnelError(ErrorCode::StepUnderflow, "finite-difference step below 1e-12");

  auto angle_at = [&](double s) {
    const Vec2 uv = motion(s);
    const Vec3 n = surface_frame(offset.base(), uv).N;
    const Vec3 a = V(uv), b = W(uv);
    return std::atan2(n.dot(a.cross(b)) / (a.norm() * b.norm()), a.dot(b) / (a.norm() * b.norm()));
  };

  const Vec2 uv = motion(t);
  const Vec3 n = surface_frame(offset.base(), uv).N;
  const Vec3 v = V(uv), w = W(uv);
  const double nv = v.norm(), nw = w.norm();
  if (!(nv > 1e-12) || !(nw > 1e-12)) throw TunnelError(ErrorCode::VanishingField, "field vanishes on the motion");

  const double phi = angle_at(t);
  const double phi_dot = wrap_pi(angle_at(t + step) - angle_at(t - step)) / (2.0 * step);
  const double lhs = phi_dot * std::cos(phi);

  const Vec2 uv_f = motion(t + step), uv_b = motion(t - step);
  const Vec3 dv = tangential((V(uv_f) - V(uv_b)) / (2.0 * step), n);
  const Vec3 dw = tangential((W(uv_f) - W(uv_b)) / (2.0 * step), n);
  // R(-pi/2) X = X x N in the tangent plane oriented by N.
  const double rhs = (perp_part(dv, v).dot(w.cross(n)) - perp_part(dw, w).dot(v.cross(n))) / (nv * nw);
  return std::abs(lhs - rhs);
}

}  // namespace tunnelnav
