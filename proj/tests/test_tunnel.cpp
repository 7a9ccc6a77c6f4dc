#include <gtest/gtest.h>

#include <vector>

#include "test_util.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/tunnel.hpp"

using namespace tunnelnav;
using namespace tunnelnav::testing;

namespace {

std::vector<ParametricTunnel> all_kinds() { return {unit_cylinder(), ring_torus(), waisted(), bent_torus()}; }

Vec3 fd(const ParametricTunnel& t, const Vec2& uv, int axis, double h) {
  Vec2 d = Vec2::Zero();
  d[axis] = h;
  return (t.point(uv + d) - t.point(uv - d)) / (2.0 * h);
}

}  // namespace

TEST(Chart, JetMatchesCentralDifferences) {
  const double h = 1e-5;
  for (const ParametricTunnel& t : all_kinds()) {
    for (const Vec2 uv : {Vec2(0.3, 0.4), Vec2(2.0, 1.1), Vec2(4.5, 0.2)}) {
      const ChartJet j = t.jet(uv);
      EXPECT_LT((j.X - t.point(uv)).norm(), 1e-14);
      EXPECT_LT((j.Xu - fd(t, uv, 0, h)).norm(), 1e-6) << to_string(t.kind());
      EXPECT_LT((j.Xv - fd(t, uv, 1, h)).norm(), 1e-6) << to_string(t.kind());
      const Vec2 du(h, 0.0), dv(0.0, h);
      EXPECT_LT((j.Xuu - (t.jet(uv + du).Xu - t.jet(uv - du).Xu) / (2 * h)).norm(), 1e-6);
      EXPECT_LT((j.Xuv - (t.jet(uv + dv).Xu - t.jet(uv - dv).Xu) / (2 * h)).norm(), 1e-6);
      EXPECT_LT((j.Xvv - (t.jet(uv + dv).Xv - t.jet(uv - dv).Xv) / (2 * h)).norm(), 1e-6);
    }
  }
}

TEST(Chart, OrientationMakesNormalPointInward) {
  // Inward means towards the axis of the cylinder or the core circle of the torus.
  const ParametricTunnel cyl = unit_cylinder();
  const ChartJet jc = cyl.jet({0.7, 0.0});
  const Vec3 nc = cyl.orientation() * jc.Xu.cross(jc.Xv);
  EXPECT_LT(nc.dot(Vec3(jc.X[0], jc.X[1], 0.0)), 0.0);

  const ParametricTunnel tor = ring_torus();
  const Vec2 uv(1.0, 2.0);
  const ChartJet jt = tor.jet(uv);
  const Vec3 core(2.0 * std::cos(uv[1]), 2.0 * std::sin(uv[1]), 0.0);
  EXPECT_LT((tor.orientation() * jt.Xu.cross(jt.Xv)).dot(jt.X - core), 0.0);
}

TEST(Chart, BasisIsTheSecondChartCoordinate) {
  EXPECT_DOUBLE_EQ(unit_cylinder().basis({1.0, 3.7}).b, 3.7);
  EXPECT_DOUBLE_EQ(ring_torus().basis({1.0, 2.5}).b, 2.5);
  EXPECT_EQ(unit_cylinder().basis_type(), BasisType::Line);
  EXPECT_EQ(ParametricTunnel::cylinder(1.0, 10.0).basis_type(), BasisType::Interval);
  EXPECT_EQ(ring_torus().basis_type(), BasisType::Circle);
  EXPECT_TRUE(ParametricTunnel::cylinder(1.0, 10.0).is_open());
  EXPECT_FALSE(ring_torus().is_open());
}

TEST(Chart, NormalizeWrapsPeriodicAndClampsBounded) {
  const ParametricTunnel open = ParametricTunnel::cylinder(1.0, 10.0);
  const Vec2 n = open.normalize({-0.5, 12.0});
  EXPECT_NEAR(n[0], kTwoPi - 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(n[1], 10.0);
  EXPECT_TRUE(open.contains(n));
  const Vec2 t = ring_torus().normalize({7.0, -1.0});
  EXPECT_NEAR(t[0], 7.0 - kTwoPi, 1e-15);
  EXPECT_NEAR(t[1], kTwoPi - 1.0, 1e-15);
}

TEST(Chart, RejectsDegenerateParameters) {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const TunnelError& e) {
      return e.code();
    }
    return ErrorCode::ConfigError;
  };
  EXPECT_EQ(code([] { ParametricTunnel::cylinder(0.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([] { ParametricTunnel::torus(0.5, 0.5); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([] { ParametricTunnel::revolution({}, 0.0, 1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([] { ParametricTunnel::revolution({1.0, -2.0}, 0.0, 1.0); }), ErrorCode::InvalidArgument);
}

TEST(Chart, ConstantProfileRevolutionIsACylinder) {
  const ParametricTunnel rev = ParametricTunnel::revolution({1.0}, -5.0, 5.0);
  const ParametricTunnel cyl = unit_cylinder();
  for (const Vec2 uv : {Vec2(0.1, 0.2), Vec2(3.0, -4.0)}) EXPECT_LT((rev.point(uv) - cyl.point(uv)).norm(), 1e-15);
}

TEST(Warp, InverseAndIdentity) {
  PolynomialWarp w;
  w.linear << 1.0, 0.2, 0.0, 0.0, 1.0, 0.1, 0.05, 0.0, 0.9;
  w.offset = Vec3(0.1, -0.2, 0.3);
  w.quadratic[1](0, 0) = 0.03;
  for (const Vec3 p : {Vec3(0.3, 0.2, 0.1), Vec3(-1.0, 2.0, 0.5)}) {
    EXPECT_LT((w.apply(w.inverse(p)) - p).norm(), 1e-12);
    EXPECT_TRUE(PolynomialWarp::identity().apply(p) == p);
  }
  const ParametricTunnel same = ParametricTunnel::warped(ring_torus(), PolynomialWarp::identity());
  EXPECT_EQ(same.orientation(), ring_torus().orientation());
  EXPECT_LT((same.point({1.0, 2.0}) - ring_torus().point({1.0, 2.0})).norm(), 1e-15);
}

TEST(Warp, MirrorFlipsOrientation) {
  PolynomialWarp mirror;
  mirror.linear(0, 0) = -1.0;
  EXPECT_EQ(ParametricTunnel::warped(ring_torus(), mirror).orientation(), -ring_torus().orientation());
}
