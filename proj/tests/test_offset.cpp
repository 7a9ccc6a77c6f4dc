#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "tunnelnav/audit.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/offset.hpp"
#include "tunnelnav/projection.hpp"

using namespace tunnelnav;
using namespace tunnelnav::testing;

TEST(Offset, PointAndRangeChecks) {
  const ParametricTunnel c = unit_cylinder();
  EXPECT_LT((offset_point(c, 0.3, {0.0, 2.0}, 0.8) - Vec3(0.7, 0.0, 2.0)).norm(), 1e-15);
  EXPECT_LT((offset_point(c, 0.0, {0.0, 2.0}, 0.8) - Vec3(1.0, 0.0, 2.0)).norm(), 1e-15);
  for (double d : {0.8, 1.0, -0.1}) {
    try {
      offset_point(c, d, {0.0, 0.0}, 0.8);
      FAIL() << d;
    } catch (const TunnelError& e) {
      EXPECT_EQ(e.code(), ErrorCode::OffsetOutOfRange);
    }
  }
  EXPECT_NO_THROW(offset_point(c, -0.05, {0.0, 0.0}, 0.8, 0.1));
}

TEST(Offset, ProjectionInvertsTheOffsetMap) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), dd(0.01, 0.39);
  const ParametricTunnel t = ring_torus();
  for (int k = 0; k < 100; ++k) {
    const Vec2 uv(ang(rng), ang(rng));
    const double d = dd(rng);
    const ProjectionResult pr = project(t, offset_point(t, d, uv, 0.4));
    EXPECT_NEAR(pr.distance, d, 1e-9);
    EXPECT_LT((pr.foot_point - t.point(uv)).norm(), 1e-9);
  }
}

TEST(Offset, DifferentialMatchesFiniteDifferencesOfTheOffsetPoint) {
  const double h = 1e-6;
  for (const ParametricTunnel& t : {ring_torus(), bent_torus(), waisted()}) {
    const OffsetSurface off(t, 0.2);
    const Vec2 uv(1.1, 0.8);
    const OffsetFrame f = offset_frame(off, uv);
    const Vec3 du = (off.point(uv + Vec2(h, 0)) - off.point(uv - Vec2(h, 0))) / (2 * h);
    const Vec3 dv = (off.point(uv + Vec2(0, h)) - off.point(uv - Vec2(0, h))) / (2 * h);
    EXPECT_LT((f.tangent_basis[0] - du).norm(), 1e-7);
    EXPECT_LT((f.tangent_basis[1] - dv).norm(), 1e-7);
    EXPECT_NEAR(f.N_star.dot(du), 0.0, 1e-7);
    EXPECT_NEAR(f.N_star.dot(dv), 0.0, 1e-7);
    EXPECT_NEAR(f.tau_star.norm(), 1.0, 1e-14);
  }
}

TEST(Offset, CylinderDifferentialNorms) {
  // Id - d* S has eigenvalues 1 and 1 - d* on the unit cylinder.
  const OffsetSurface off(unit_cylinder(), 0.4);
  const auto n = off.differential_norms({0.3, 0.0});
  EXPECT_NEAR(n[0], 1.0, 1e-12);
  EXPECT_NEAR(n[1], 1.0 / 0.6, 1e-12);
}

TEST(Offset, NormBoundsHoldOnTheAuditGrid) {
  const ParametricTunnel t = ring_torus();
  const RegularityAudit a = regularity_audit(t, 32, 0.4);
  const OffsetSurface off(t, 0.25);
  for (const Vec2& uv : audit_grid(t, 32)) {
    const auto n = off.differential_norms(uv);
    EXPECT_LE(n[0], 1.0 + 0.25 * a.constants.L_N + 1e-6);
    EXPECT_LE(n[1], 1.0 / a.constants.delta_kappa + 1e-6);
  }
}

TEST(Offset, CovariantDerivativeOfAParallelFieldVanishes) {
  // The axial unit field on a cylinder offset is parallel.
  const OffsetSurface off(unit_cylinder(), 0.3);
  const TangentField axial = [](const Vec2&) { return Vec3(Vec3::UnitZ()); };
  const Vec3 V = offset_frame(off, {0.4, 1.0}).tangent_basis[0];
  EXPECT_LT(covariant_derivative(off, axial, {0.4, 1.0}, V).norm(), 1e-9);
  try {
    covariant_derivative(off, axial, {0.4, 1.0}, V, 1e-13);
    FAIL();
  } catch (const TunnelError& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepUnderflow);
  }
}

TEST(Offset, CircumferentialFieldTurnsWithGeodesicCurvatureZero) {
  // The unit circumferential field on a cylinder is parallel along the circle too.
  const OffsetSurface off(unit_cylinder(), 0.3);
  const TangentField circ = [](const Vec2& uv) { return Vec3(-std::sin(uv[0]), std::cos(uv[0]), 0.0); };
  const Vec3 V = offset_frame(off, {0.4, 1.0}).tangent_basis[0];
  EXPECT_LT(covariant_derivative(off, circ, {0.4, 1.0}, V).norm(), 1e-8);
}

TEST(Offset, AngleRateResidualIsSmall) {
  const OffsetSurface off(ring_torus(), 0.25);
  const ChartCurve motion = [](double t) { return Vec2(0.3 + 0.7 * t, 1.0 - 0.4 * t); };
  const TangentField V = [&](const Vec2& uv) { return offset_frame(off, uv).tangent_basis[0]; };
  const TangentField W = [&](const Vec2& uv) {
    const OffsetFrame f = offset_frame(off, uv);
    return Vec3(0.5 * f.tangent_basis[0] + f.tangent_basis[1]);
  };
  EXPECT_LE(angle_rate_residual(off, motion, V, W, 0.0), 1e-4);
  const TangentField zero = [](const Vec2&) { return Vec3(Vec3::Zero()); };
  try {
    angle_rate_residual(off, motion, V, zero, 0.0);
    FAIL();
  } catch (const TunnelError& e) {
    EXPECT_EQ(e.code(), ErrorCode::VanishingField);
  }
}
