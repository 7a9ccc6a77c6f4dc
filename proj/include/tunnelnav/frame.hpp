#pragma once

#include <array>
#include <optional>

#include "tunnelnav/tunnel.hpp"
#include "tunnelnav/types.hpp"

namespace tunnelnav {

/// Differential invariants of S at one chart point. N points into the tunnel
/// and the shape operator is -dN, so a surface bending towards N has positive
/// normal curvature.
struct ShapeFrame {
  Vec2 uv = Vec2::Zero();
  Vec3 point = Vec3::Zero();
  std::array<Vec3, 2> tangent_basis;  // chart partials Xu, Xv
  std::array<Vec3, 2> ortho_basis;    // orthonormal (e1, e2) with e2 = N x e1
  Vec3 N = Vec3::Zero();
  Mat2 shape_op = Mat2::Zero();  // shape operator in ortho_basis coordinates
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
  Vec3 E_minus = Vec3::Zero();
  Vec3 E_plus = Vec3::Zero();
  Vec3 tau = Vec3::Zero();
  Vec3 grad_B = Vec3::Zero();

  /// Shape operator as an ambient 3x3 map that annihilates N.
  Mat3 shape_operator3() const;
  /// Applies the shape operator to a tangent vector.
  Vec3 apply_shape(const Vec3& V) const { return shape_operator3() * V; }
  /// Coordinates of an ambient vector in ortho_basis.
  Vec2 to_plane(const Vec3& V) const { return {V.dot(ortho_basis[0]), V.dot(ortho_basis[1])}; }
  Vec3 from_plane(const Vec2& c) const { return c[0] * ortho_basis[0] + c[1] * ortho_basis[1]; }
};

/// Caller-owned memory of the previously returned direction fields. Signs of
/// E-, E+ and tau are flipped to agree with it; it is updated on every query.
struct FrameContinuity {
  std::optional<Vec3> e_minus;
  std::optional<Vec3> e_plus;
  std::optional<Vec3> tau;
};

inline constexpr double kUmbilicTolerance = 1e-8;
inline constexpr double kTangentTolerance = 1e-8;

ShapeFrame surface_frame(const ParametricTunnel& tunnel, const Vec2& uv,
                         FrameContinuity* continuity = nullptr);

/// II(V, W) = <S V, W> for tangent V, W.
double second_fundamental_form(const ShapeFrame& frame, const Vec3& V, const Vec3& W);

/// Unit tangent to the meridian through the frame point. Throws
/// DegenerateProjection when |grad B| < min_grad.
Vec3 meridian_tangent(const ShapeFrame& frame, double min_grad = 1e-12,
                      FrameContinuity* continuity = nullptr);

/// Ratio sin(QA, QB) / sin(A, B) with signed sines taken in the plane whose
/// positive side is the (implicit) normal e1 x e2. Q must be symmetric
/// positive definite.
double sine_angle_scaling(const Mat2& Q, const Vec2& A, const Vec2& B);

/// Same ratio for ambient tangent vectors at a frame, with Q given in the
/// frame's ortho_basis coordinates and the sign taken from N.
double sine_angle_scaling(const ShapeFrame& frame, const Mat2& Q, const Vec3& A, const Vec3& B);

/// Signed sine of the angle from C to D looking from the side of `normal`.
double signed_sine(const Vec3& normal, const Vec3& C, const Vec3& D);

/// Unsigned angle in [0, pi/2] between the lines spanned by a and b.
double line_angle(const Vec3& a, const Vec3& b);

/// Deterministic sign: first component with magnitude above 1e-9 * |v| made positive.
Vec3 canonical_sign(const Vec3& v);

/// Flips v to have non-negative inner product with reference.
inline Vec3 align_sign(const Vec3& v, const Vec3& reference) { return v.dot(reference) < 0.0 ? Vec3(-v) : v; }

}  // namespace tunnelnav
