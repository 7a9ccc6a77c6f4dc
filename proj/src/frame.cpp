#include "tunnelnav/frame.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tunnelnav/errors.hpp"

namespace tunnelnav {

namespace {

std::string at(const Vec2& uv) {
  std::ostringstream os;
  os.precision(17);
  os << "(u,v)=(" << uv[0] << ", " << uv[1] << ")";
  return os.str();
}

double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace

Vec3 canonical_sign(const Vec3& v) {
  const double threshold = 1e-9 * v.norm();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > threshold) return v[i] < 0.0 ? Vec3(-v) : v;
  }
  return v;
}

double signed_sine(const Vec3& normal, const Vec3& C, const Vec3& D) {
  return normal.dot(C.cross(D)) / (C.norm() * D.norm());
}

double line_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), std::abs(a.dot(b)));
}

Mat3 ShapeFrame::shape_operator3() const {
  Eigen::Matrix<double, 3, 2> P;
  P.col(0) = ortho_basis[0];
  P.col(1) = ortho_basis[1];
  return P * shape_op * P.transpose();
}

ShapeFrame surface_frame(const ParametricTunnel& tunnel, const Vec2& uv, FrameContinuity* continuity) {
  const ChartJet j = tunnel.jet(uv);
  const Vec3 n = j.Xu.cross(j.Xv);
  const double scale = j.Xu.norm() * j.Xv.norm();
  if (!(n.norm() > 1e-12 * scale) || !(scale > 0.0)) {
    throw TunnelError(ErrorCode::DegenerateChart, "tangent basis is rank-deficient at " + at(uv));
  }

  ShapeFrame f;
  f.uv = uv;
  f.point = j.X;
  f.tangent_basis = {j.Xu, j.Xv};
  f.N = tunnel.orientation() * n / n.norm();

  Mat2 metric;
  metric << j.Xu.dot(j.Xu), j.Xu.dot(j.Xv), j.Xu.dot(j.Xv), j.Xv.dot(j.Xv);
  Mat2 second;
  second << j.Xuu.dot(f.N), j.Xuv.dot(f.N), j.Xuv.dot(f.N), j.Xvv.dot(f.N);
  const Mat2 metric_inv = metric.inverse();

  const Vec3 e1 = j.Xu.normalized();
  const Vec3 e2 = f.N.cross(e1);
  f.ortho_basis = {e1, e2};

  // Chart coordinates of e1, e2; S in the orthonormal basis is T^T II T.
  Mat2 T;
  T.col(0) = metric_inv * Vec2(j.Xu.dot(e1), j.Xv.dot(e1));
  T.col(1) = metric_inv * Vec2(j.Xu.dot(e2), j.Xv.dot(e2));
  Mat2 S = T.transpose() * second * T;
  S(0, 1) = S(1, 0) = 0.5 * (S(0, 1) + S(1, 0));
  f.shape_op = S;

  const double mean = 0.5 * (S(0, 0) + S(1, 1));
  const double radius = std::hypot(0.5 * (S(0, 0) - S(1, 1)), S(0, 1));
  f.kappa_minus = mean - radius;
  f.kappa_plus = mean + radius;
  if (f.kappa_plus - f.kappa_minus < kUmbilicTolerance) {
    throw TunnelError(ErrorCode::UmbilicPoint, "principal curvatures coincide at " + at(uv));
  }
  const double theta = 0.5 * std::atan2(2.0 * S(0, 1), S(0, 0) - S(1, 1));
  f.E_plus = std::cos(theta) * e1 + std::sin(theta) * e2;
  f.E_minus = -std::sin(theta) * e1 + std::cos(theta) * e2;

  const BasisJet b = tunnel.basis(uv);
  const Vec2 grad_coords = metric_inv * Vec2(b.bu, b.bv);
  f.grad_B = grad_coords[0] * j.Xu + grad_coords[1] * j.Xv;
  const double grad_norm = f.grad_B.norm();
  if (!(grad_norm > 1e-12)) {
    throw TunnelError(ErrorCode::DegenerateProjection, "basis projection has vanishing gradient at " + at(uv));
  }
  f.tau = f.N.cross(f.grad_B) / grad_norm;

  if (continuity != nullptr) {
    f.E_minus = continuity->e_minus ? align_sign(f.E_minus, *continuity->e_minus) : canonical_sign(f.E_minus);
    f.E_plus = continuity->e_plus ? align_sign(f.E_plus, *continuity->e_plus) : canonical_sign(f.E_plus);
    f.tau = continuity->tau ? align_sign(f.tau, *continuity->tau) : canonical_sign(f.tau);
    continuity->e_minus = f.E_minus;
    continuity->e_plus = f.E_plus;
    continuity->tau = f.tau;
  } else {
    f.E_minus = canonical_sign(f.E_minus);
    f.E_plus = canonical_sign(f.E_plus);
    f.tau = canonical_sign(f.tau);
  }
  return f;
}

double second_fundamental_form(const ShapeFrame& frame, const Vec3& V, const Vec3& W) {
  for (const Vec3* x : {&V, &W}) {
    if (std::abs(x->dot(frame.N)) > kTangentTolerance * std::max(1.0, x->norm())) {
      throw TunnelError(ErrorCode::NotTangent, "argument has a normal component at " + at(frame.uv));
    }
  }
  return frame.to_plane(W).dot(frame.shape_op * frame.to_plane(V));
}

Vec3 meridian_tangent(const ShapeFrame& frame, double min_grad, FrameContinuity* continuity) {
  const double g = frame.grad_B.norm();
  if (!(g >= min_grad)) {
    throw TunnelError(ErrorCode::DegenerateProjection, "|grad B| below threshold at " + at(frame.uv));
  }
  Vec3 tau = frame.N.cross(frame.grad_B) / g;
  if (continuity != nullptr && continuity->tau) {
    tau = align_sign(tau, *continuity->tau);
  } else {
    tau = canonical_sign(tau);
  }
  if (continuity != nullptr) continuity->tau = tau;
  return tau;
}

double sine_angle_scaling(const Mat2& Q, const Vec2& A, const Vec2& B) {
  const double asym = std::abs(Q(0, 1) - Q(1, 0));
  if (asym > 1e-12 * std::max(1.0, Q.norm())) {
    throw TunnelError(ErrorCode::InvalidArgument, "operator must be symmetric");
  }
  const double mean = 0.5 * (Q(0, 0) + Q(1, 1));
  const double radius = std::hypot(0.5 * (Q(0, 0) - Q(1, 1)), Q(0, 1));
  if (!(mean - radius > 0.0)) throw TunnelError(ErrorCode::InvalidArgument, "operator must be positive definite");

  const double sin_ab = cross2(A, B) / (A.norm() * B.norm());
  if (!(std::abs(sin_ab) > 1e-12)) {
    throw TunnelError(ErrorCode::CollinearInput, "vectors are collinear");
  }
  const Vec2 QA = Q * A;
  const Vec2 QB = Q * B;
  const double sin_q = cross2(QA, QB) / (QA.norm() * QB.norm());
  return sin_q / sin_ab;
}

double sine_angle_scaling(const ShapeFrame& frame, const Mat2& Q, const Vec3& A, const Vec3& B) {
  // ortho_basis is right-handed about N, so the planar cross product matches [N, ., .].
  return sine_angle_scaling(Q, frame.to_plane(A), frame.to_plane(B));
}

}  // namespace tunnelnav
