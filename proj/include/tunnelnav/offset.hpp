#pragma once

#include <array>
#include <functional>

#include "tunnelnav/frame.hpp"
#include "tunnelnav/tunnel.hpp"

namespace tunnelnav {

/// h(d, s) = s + d N(s). Throws OffsetOutOfRange unless -eps < d < d_plus.
Vec3 offset_point(const ParametricTunnel& tunnel, double d, const Vec2& uv, double d_plus,
                  double eps = 0.0);

/// Frame of the offset surface S(d*) at J(s), s = chart(uv).
struct OffsetFrame {
  Vec3 point = Vec3::Zero();
  Vec3 N_star = Vec3::Zero();    // unit normal of S(d*), pointing away from S
  Vec3 tau_star = Vec3::Zero();  // unit tangent of the offset meridian
  std::array<Vec3, 2> tangent_basis;  // dJ/du, dJ/dv
  double stretch = 0.0;          // |J' tau|
};

/// The locus S(d*) of points at clearance d* together with J = h(d*, .).
class OffsetSurface {
 public:
  OffsetSurface(ParametricTunnel base, double d_star);

  const ParametricTunnel& base() const { return base_; }
  double d_star() const { return d_star_; }

  Vec3 point(const Vec2& uv) const;
  /// J' = Id - d* S as an ambient map on the tangent plane of S at uv.
  Mat3 differential(const ShapeFrame& frame) const;
  /// Spectral norms of J' and its inverse at uv.
  std::array<double, 2> differential_norms(const Vec2& uv) const;

 private:
  ParametricTunnel base_;
  double d_star_;
};

OffsetFrame offset_frame(const OffsetSurface& offset, const Vec2& uv, FrameContinuity* continuity = nullptr);

/// A tangent vector field on S(d*) parametrised by base-chart coordinates.
using TangentField = std::function<Vec3(const Vec2& uv)>;
/// A motion over S(d*) given by a curve in base-chart coordinates.
using ChartCurve = std::function<Vec2(double t)>;

/// Levi-Civita derivative nabla_V F on S(d*) by central differences along a
/// chart line with velocity V, projected on the tangent plane. `step` is in
/// arc length.
Vec3 covariant_derivative(const OffsetSurface& offset, const TangentField& field, const Vec2& uv, const Vec3& V,
                          double step = 1e-5);

/// |phi' cos phi - (<(nabla V)_{V-perp}, R(-pi/2) W> - <(nabla W)_{W-perp}, R(-pi/2) V>) / (|V||W|)|
/// for phi = signed angle(V, W) along the motion at time t; both sides by
/// central differences with time step `step`.
double angle_rate_residual(const OffsetSurface& offset, const ChartCurve& motion, const TangentField& V,
                           const TangentField& W, double t, double step = 1e-5);

}  // namespace tunnelnav
