#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/projection.hpp"

using namespace tunnelnav;
using namespace tunnelnav::testing;

namespace {

// Nearest point of the torus (R, r) to an interior point off the core circle.
Vec3 torus_foot(const Vec3& p, double R, double r) {
  const double rho = std::hypot(p[0], p[1]);
  const Vec3 core(R * p[0] / rho, R * p[1] / rho, 0.0);
  return core + r * (p - core).normalized();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const TunnelError& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(Projection, CylinderRadialPoint) {
  const ProjectionResult p = project(unit_cylinder(), Vec3(0.5, 0.0, 0.0));
  EXPECT_NEAR(p.distance, 0.5, 1e-12);
  EXPECT_LT((p.foot_point - Vec3(1, 0, 0)).norm(), 1e-12);
  EXPECT_LT((p.direction - Vec3(1, 0, 0)).norm(), 1e-12);
}

TEST(Projection, TorusMatchesClosedForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(0.02, 0.45);
  const ParametricTunnel t = ring_torus();
  for (int k = 0; k < 200; ++k) {
    const double u = ang(rng), v = ang(rng), s = rad(rng);
    const Vec3 core(2.0 * std::cos(v), 2.0 * std::sin(v), 0.0);
    const Vec3 dir = std::cos(u) * Vec3(std::cos(v), std::sin(v), 0.0) + std::sin(u) * Vec3::UnitZ();
    const Vec3 p = core + s * dir;
    const ProjectionResult pr = project(t, p);
    EXPECT_LT((pr.foot_point - torus_foot(p, 2.0, 0.5)).norm(), 1e-9);
    EXPECT_NEAR(pr.distance, 0.5 - s, 1e-9);
  }
}

TEST(Projection, OracleModeAgrees) {
  ProjectionOptions oracle;
  oracle.oracle = true;
  for (const ParametricTunnel& t : {ring_torus(), bent_torus()}) {
    const Vec3 p = t.point({0.7, 1.9}) + 0.2 * Vec3(-std::cos(1.9), -std::sin(1.9), 0.05);
    const ProjectionResult a = project(t, p), b = project(t, p, oracle);
    EXPECT_LT((a.foot_point - b.foot_point).norm(), 1e-7);
    EXPECT_NEAR(a.distance, b.distance, 1e-12);
  }
}

TEST(Projection, FootIsANormalFoot) {
  const ParametricTunnel t = bent_torus();
  const Vec3 p = t.point({2.2, 4.0}) * 0.95;
  const ProjectionResult pr = project(t, p);
  const ChartJet j = t.jet(pr.foot_uv);
  EXPECT_LT(std::abs((pr.foot_point - p).dot(j.Xu)), 1e-10);
  EXPECT_LT(std::abs((pr.foot_point - p).dot(j.Xv)), 1e-10);
}

TEST(Projection, AxisPointIsNotUnique) {
  EXPECT_EQ(code_of([] { project(unit_cylinder(), Vec3(0.0, 0.0, 1.0)); }), ErrorCode::NonUniqueProjection);
}

TEST(Projection, SurfacePointIsRejected) {
  EXPECT_EQ(code_of([] { project(unit_cylinder(), Vec3(1.0, 0.0, 0.0)); }), ErrorCode::InvalidArgument);
}

TEST(Projection, BoundaryVicinityRaisesWithResult) {
  const ParametricTunnel open = ParametricTunnel::cylinder(1.0, 10.0);
  ProjectionOptions opt;
  opt.delta_s = 0.2;
  try {
    project(open, Vec3(0.5, 0.0, 0.1), opt);
    FAIL() << "edge vicinity not reported";
  } catch (const BoundaryProjection& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProjectionOnBoundary);
    EXPECT_NEAR(e.result().boundary_distance, 0.1, 1e-9);
    EXPECT_NEAR(e.result().distance, 0.5, 1e-12);
  }
  EXPECT_NEAR(project(open, Vec3(0.5, 0.0, 4.0), opt).boundary_distance, 4.0, 1e-9);
  EXPECT_TRUE(std::isinf(project(ring_torus(), Vec3(2.2, 0.0, 0.0)).boundary_distance));
}

TEST(Projection, LocalRefinementFromNearbySeed) {
  const ParametricTunnel t = ring_torus();
  const Vec3 p(2.2, 0.1, 0.05);
  const LocalProjection lp = project_local(t, p, Vec2(0.3, 0.3));
  EXPECT_TRUE(lp.converged);
  EXPECT_FALSE(lp.on_edge);
  EXPECT_LT((lp.foot - torus_foot(p, 2.0, 0.5)).norm(), 1e-10);
}

TEST(Projection, LocalRefinementPastTheEndStopsOnTheEdge) {
  const ParametricTunnel open = ParametricTunnel::cylinder(1.0, 10.0);
  const LocalProjection lp = project_local(open, Vec3(0.5, 0.0, 11.0), Vec2(0.0, 9.5));
  EXPECT_TRUE(lp.on_edge);
  EXPECT_NEAR(lp.uv[1], 10.0, 1e-12);
}
