#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tunnelnav/errors.hpp"
#include "tunnelnav/navsim.hpp"

using namespace tunnelnav;
using namespace tunnelnav::testing;

namespace {

DirectionEstimate fake_estimate(const Vec3& line, double d, const Vec3& towards_foot) {
  DirectionEstimate e;
  e.line_dir = line;
  e.foot.distance = d;
  e.foot.direction = towards_foot;
  return e;
}

SimLog synthetic_log(const std::vector<double>& b, const std::vector<double>& d, bool closed = true) {
  SimLog log;
  log.closed = closed;
  for (std::size_t i = 0; i < b.size(); ++i) {
    SimRow row;
    row.t = 0.1 * i;
    row.b = b[i];
    row.d = d[i];
    log.rows.push_back(row);
  }
  return log;
}

}  // namespace

TEST(ControlStep, FollowsTheLineAndCorrectsClearance) {
  ControllerConfig cfg;
  cfg.gain = 2.0;
  RobotState s;
  const DirectionEstimate at_target = fake_estimate(Vec3(0, 0, 1), 0.5, Vec3(1, 0, 0));
  RobotState n = control_step(s, at_target, cfg, 0.5);
  EXPECT_NEAR((n.heading - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((n.position - Vec3(0, 0, cfg.speed * cfg.dt)).norm(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(n.t, cfg.dt);

  // Too far from the wall: steer towards the foot.
  n = control_step(s, fake_estimate(Vec3(0, 0, 1), 0.7, Vec3(1, 0, 0)), cfg, 0.5);
  EXPECT_NEAR((n.heading - Vec3(0.4, 0, 1).normalized()).norm(), 0.0, 1e-14);
  // Too close: steer away.
  n = control_step(s, fake_estimate(Vec3(0, 0, 1), 0.3, Vec3(1, 0, 0)), cfg, 0.5);
  EXPECT_LT(n.heading[0], 0.0);
}

TEST(ControlStep, HeadingSignAndContinuity) {
  ControllerConfig cfg;
  cfg.heading_sign = -1;
  const DirectionEstimate e = fake_estimate(Vec3(0, 0, 1), 0.5, Vec3(1, 0, 0));
  RobotState s;
  s = control_step(s, e, cfg, 0.5);
  EXPECT_LT(s.heading[2], 0.0);
  // A flipped line keeps the previous direction of travel.
  s = control_step(s, fake_estimate(Vec3(0, 0.01, -1), 0.5, Vec3(1, 0, 0)), cfg, 0.5);
  EXPECT_LT(s.heading[2], 0.0);
}

TEST(ControlStep, ZeroGainKeepsClearanceOnCylinder) {
  const ParametricTunnel c = unit_cylinder();
  ControllerConfig cfg;
  cfg.gain = 0.0;
  SensorConfig sensor;
  sensor.n_phi = 64;
  RobotState s;
  s.position = Vec3(0.5, 0.0, 0.0);
  for (int k = 0; k < 20; ++k) {
    const DirectionEstimate e = mdpbe(c, s.position, sensor);
    s = control_step(s, e, cfg, 0.3);
    EXPECT_NEAR(std::hypot(s.position[0], s.position[1]), 0.5, 1e-9);
  }
  EXPECT_NEAR(s.position[2], 20 * cfg.speed * cfg.dt, 1e-9);
}

TEST(BasicCoordinate, Examples) {
  EXPECT_NEAR(basic_coordinate(unit_cylinder(), Vec3(0.5, 0.0, 3.7)), 3.7, 1e-12);
  EXPECT_THROW(basic_coordinate(unit_cylinder(), Vec3(0.0, 0.0, 1.0)), TunnelError);
  const ParametricTunnel t = ring_torus();
  BasisContinuity ctx;
  double prev = 0.0;
  for (int k = 0; k <= 80; ++k) {
    const double v = 0.1 * k;
    const double b = basic_coordinate(t, Vec3(2.2 * std::cos(v), 2.2 * std::sin(v), 0.0), &ctx);
    EXPECT_NEAR(b, v, 1e-9);
    if (k > 0) EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(EvaluateSolve, MonotoneSuffix) {
  ControllerConfig cfg;
  cfg.v_b_required = 0.4;
  // b stalls first, then advances at unit rate while d converges.
  std::vector<double> b, d;
  for (int i = 0; i < 40; ++i) {
    b.push_back(i < 10 ? 0.0 : 0.1 * (i - 10));
    d.push_back(0.5 + 0.2 * std::exp(-0.2 * i));
  }
  const SolveReport rep = evaluate_solve(synthetic_log(b, d), cfg, 0.5);
  EXPECT_EQ(rep.direction_sign, 1);
  EXPECT_NEAR(rep.t0, 1.0, 1e-12);
  EXPECT_TRUE(rep.d_monotone);
  EXPECT_GE(rep.min_abs_bdot, 0.4);
  EXPECT_TRUE(rep.solved);
  EXPECT_NEAR(rep.horizon, 3.9, 1e-12);
}

TEST(EvaluateSolve, ReversalAndDivergence) {
  ControllerConfig cfg;
  cfg.v_b_required = 0.1;
  std::vector<double> b, d;
  for (int i = 0; i < 30; ++i) {
    b.push_back(i < 15 ? 0.1 * i : 1.5 - 0.1 * (i - 15));
    d.push_back(0.5);
  }
  SolveReport rep = evaluate_solve(synthetic_log(b, d), cfg, 0.5);
  EXPECT_EQ(rep.direction_sign, -1);
  EXPECT_GT(rep.t0, 1.4);

  std::vector<double> far(30);
  for (int i = 0; i < 30; ++i) far[i] = 0.5 + 0.01 * i;
  rep = evaluate_solve(synthetic_log(b, far), cfg, 0.5);
  EXPECT_FALSE(rep.solved);
}

TEST(EvaluateSolve, OpenTunnelNeedsTheEnd) {
  ControllerConfig cfg;
  SimLog log = synthetic_log({0.0, 0.1, 0.2}, {0.5, 0.5, 0.5}, false);
  EXPECT_FALSE(evaluate_solve(log, cfg, 0.5).solved);
  log.end_reached = true;
  EXPECT_TRUE(evaluate_solve(log, cfg, 0.5).solved);
  log.contact = true;
  EXPECT_FALSE(evaluate_solve(log, cfg, 0.5).solved);
}

TEST(RunScenario, TorusLoopConverges) {
  const ParametricTunnel t = ring_torus();
  ControllerConfig cfg;
  cfg.dt = 0.05;
  cfg.horizon = 10.0;
  SensorConfig sensor;
  sensor.n_phi = 64;
  const Zone zone{0.1, 0.4, 0.25, 0.0};
  const SimLog log = run_scenario(t, cfg, sensor, zone, Vec3(2.2, 0.0, 0.0));
  EXPECT_TRUE(log.error.empty()) << log.error;
  EXPECT_FALSE(log.contact);
  ASSERT_FALSE(log.rows.empty());
  EXPECT_NEAR(log.rows.back().t, 10.0, 1e-9);
  EXPECT_LT(std::abs(log.rows.back().d - 0.25), std::abs(log.rows.front().d - 0.25));
  for (const SimRow& r : log.rows) {
    EXPECT_GT(r.d, zone.d_minus);
    EXPECT_LT(r.d, zone.d_plus);
  }
  cfg.v_b_required = 0.01;
  const SolveReport rep = evaluate_solve(log, cfg, 0.25);
  EXPECT_NE(rep.direction_sign, 0);
  EXPECT_GT(rep.min_abs_bdot, 0.01);
}

TEST(RunScenario, OpenCylinderReachesTheEnd) {
  const ParametricTunnel c = ParametricTunnel::cylinder(1.0, 4.0);
  ControllerConfig cfg;
  cfg.dt = 0.05;
  cfg.horizon = 30.0;
  SensorConfig sensor;
  sensor.n_phi = 64;
  const Zone zone{0.2, 0.8, 0.4, 0.2};
  const SimLog log = run_scenario(c, cfg, sensor, zone, Vec3(0.5, 0.0, 2.0));
  EXPECT_TRUE(log.end_reached);
  EXPECT_FALSE(log.contact);
  EXPECT_TRUE(log.error.empty()) << log.error;
  EXPECT_TRUE(std::isnan(log.rows.back().phi_star));
  EXPECT_TRUE(evaluate_solve(log, cfg, zone.d_star).solved);
}

TEST(ControllerConfig, Validation) {
  ControllerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), TunnelError);
  cfg = ControllerConfig{};
  cfg.speed = -1.0;
  EXPECT_THROW(cfg.validate(), TunnelError);
}

TEST(RequiredBasisRate, DefaultAndOverride) {
  ControllerConfig cfg;
  TunnelConstants c;
  c.delta_B_minus = 0.4;
  EXPECT_NEAR(required_basis_rate(cfg, c), 0.05 * 0.2 * 0.4, 1e-15);
  cfg.v_b_required = 0.3;
  EXPECT_DOUBLE_EQ(required_basis_rate(cfg, c), 0.3);
}
