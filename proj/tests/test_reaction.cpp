#include <gtest/gtest.h>

#include <cmath>

#include "omnisafe/reaction.hpp"
#include "omnisafe/wbosc.hpp"

namespace omnisafe {
namespace {

TEST(Escape, ZeroForceStaysPut) {
  const Vec3 x0(0.3, -0.2, 0.7);
  EXPECT_EQ(escape_trajectory({}, Vec2::Zero(), x0, 3.0), x0);
}

TEST(Escape, AsymptoteAndTimeConstant) {
  AdmittanceParams a;
  a.damping = design_damping(0.8, 0.5);
  EXPECT_DOUBLE_EQ(a.damping, 1.6);
  const Vec3 x0(1.0, 2.0, 0.5);
  const Vec3 far = escape_trajectory(a, Vec2(0.8, 0.0), x0, 200.0);
  EXPECT_NEAR(far(0) - x0(0), 0.5, 1e-12);
  EXPECT_EQ(far(2), x0(2));
  EXPECT_DOUBLE_EQ(a.time_constant(), 1.25);
  const Vec3 at_tau = escape_trajectory(a, Vec2(0.8, 0.0), x0, 1.25);
  EXPECT_NEAR((at_tau(0) - x0(0)) / 0.5, 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_THROW(escape_trajectory(a, Vec2(1, 0), x0, -0.1), InputError);
}

TEST(Escape, DampingDesign) {
  EXPECT_DOUBLE_EQ(design_damping(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(design_damping(0.8, 1.0), 0.5 * design_damping(0.8, 0.5));
  EXPECT_THROW(design_damping(0.0, 1.0), InputError);
}

TEST(WheelTrajectory, ConstantPoseConstantTargets) {
  BaseParams p;
  const std::vector<Vec3> poses(20, Vec3(0.1, 0.2, 0.3));
  const WheelTrajectory w = to_wheel_trajectory(p, poses, 0.01, Vec3(1, 2, 3));
  for (const Vec3& q : w.qw) EXPECT_EQ(q, Vec3(1, 2, 3));
}

TEST(WheelTrajectory, PureXRowZero) {
  BaseParams p;
  std::vector<Vec3> poses;
  for (int k = 0; k < 10; ++k) poses.emplace_back(0.01 * k, 0.0, 0.0);
  const WheelTrajectory w = to_wheel_trajectory(p, poses, 0.1);
  const Vec3 xd(0.1, 0.0, 0.0);
  EXPECT_NEAR(w.qw_dot[5](0), base_jacobians(p, 0.0).Jcw.row(0).dot(xd), 1e-12);
}

TEST(WheelTrajectory, KinematicRoundTrip) {
  BaseParams p;
  const double dt = 1e-3;
  std::vector<Vec3> poses;
  for (int k = 0; k <= 3000; ++k) {
    const double t = k * dt;
    poses.emplace_back(0.3 * std::sin(t), 0.2 * (1 - std::cos(1.3 * t)), 0.4 * t);
  }
  const WheelTrajectory w = to_wheel_trajectory(p, poses, dt);
  Vec3 x = poses.front();
  double worst = 0.0;
  for (std::size_t k = 1; k < poses.size(); ++k) {
    // Midpoint integration of the body velocity implied by the wheel rates.
    const Vec3 v0 = body_velocity_from_wheels(p, x(2), w.qw_dot[k - 1]);
    const Vec3 xm = x + 0.5 * dt * v0;
    const Vec3 qm = 0.5 * (w.qw_dot[k - 1] + w.qw_dot[k]);
    x += dt * body_velocity_from_wheels(p, xm(2), qm);
    worst = std::max(worst, (x - poses[k]).head<2>().norm());
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Wall, AugmentedJacobianShape) {
  BaseParams p;
  const MatX jc = base_jacobians(p, 0.2).Jc;
  const MatX aug = wall_constrained_jacobian(jc, 2.0);
  EXPECT_EQ(aug.rows(), 7);
  EXPECT_EQ(aug.cols(), 9);
  EXPECT_EQ(aug(6, 0), 2.0);
  EXPECT_EQ(aug(6, 1), -1.0);
  EXPECT_EQ(aug.row(6).tail<7>().norm(), 0.0);
  const MatX small = wall_constrained_jacobian(MatX::Zero(3, 6), 1.0);
  EXPECT_EQ(small.rows(), 4);
  EXPECT_EQ(small.cols(), 6);
}

TEST(Wall, TangentProjection) {
  EXPECT_LT((wall_tangent(Vec2(1, 0), 1.0) - Vec2(0.5, 0.5)).norm(), 1e-15);
  EXPECT_LT((wall_tangent(Vec2(2, 2), 1.0) - Vec2(2, 2)).norm(), 1e-15);
  const Vec2 normal(1, -1);
  EXPECT_LT(wall_tangent(normal, 1.0).norm(), 1e-10);
}

TEST(Wall, ConstrainedNullspaceTangent) {
  // Projected base velocity under the augmented constraint stays on the wall.
  BaseParams p;
  const MatX aug = wall_constrained_jacobian(base_jacobians(p, 0.4).Jc, 1.0);
  ConstrainedSystem sys{mass_matrix(p), aug, actuation_selector()};
  const ConstraintOps c = constraint_operators(sys);
  Vec9 qd = Vec9::Zero();
  qd.head<3>() << 1.0, 0.0, 0.2;
  const VecX proj = c.Nc * qd;
  EXPECT_LT(std::abs(proj(0) - proj(1)), 1e-10);
  EXPECT_LT((wall_row(kPi / 4.0, 9) * proj).norm(), 1e-10);
}

ReactionConfig unclamped() {
  ReactionConfig c;
  c.accel_max = 0.0;
  c.remerge = false;
  return c;
}

TEST(Controller, NoDetectionPassesPlan) {
  ReactionController rc;
  for (int k = 0; k < 100; ++k) {
    const Vec3 plan(0.01 * k, 0.0, 0.1);
    const ReactionOutput o = rc.step(0.01 * k, 0.01, plan, Vec3(1, 0, 0), false,
                                     Vec2(5, 5), Vec3::Zero());
    EXPECT_EQ(o.target, plan);
    EXPECT_EQ(o.mode, ReactionMode::kTracking);
  }
}

TEST(Controller, EntersEscapeContinuouslyAndHoldsYaw) {
  ReactionController rc(unclamped());
  const Vec3 pose(0.4, 0.1, 0.3);
  rc.step(0.0, 0.01, pose, Vec3::Zero(), false, Vec2::Zero(), pose);
  const ReactionOutput o =
      rc.step(0.01, 0.01, pose, Vec3::Zero(), true, Vec2(-3.0, 0.0), pose);
  EXPECT_TRUE(o.entered_escape);
  EXPECT_EQ(o.target, pose);
  for (int k = 2; k < 3000; ++k) {
    const ReactionOutput e =
        rc.step(0.01 * k, 0.01, pose, Vec3::Zero(), false, Vec2::Zero(), pose);
    EXPECT_EQ(e.target(2), pose(2));
  }
  EXPECT_NEAR(rc.latched_force().norm(), 0.8, 1e-12);
  const ReactionOutput last =
      rc.step(200.0, 0.01, pose, Vec3::Zero(), false, Vec2::Zero(), pose);
  EXPECT_NEAR((last.target - pose).head<2>().norm(), 0.5, 1e-12);
  EXPECT_LT(last.target(0), pose(0));
}

TEST(Controller, RawLatchScalesWithForce) {
  ReactionConfig c = unclamped();
  c.latch = EscapeLatch::kRaw;
  ReactionController rc(c);
  rc.step(0.0, 0.01, Vec3::Zero(), Vec3::Zero(), true, Vec2(0, 1.6), Vec3::Zero());
  const ReactionOutput o =
      rc.step(500.0, 0.01, Vec3::Zero(), Vec3::Zero(), false, Vec2::Zero(), Vec3::Zero());
  EXPECT_NEAR(o.target(1), 1.0, 1e-12);
}

TEST(Controller, AccelerationClampKeepsAsymptote) {
  ReactionConfig c;
  c.remerge = false;
  c.accel_max = 1.0;
  ReactionController rc(c);
  const double dt = 1e-3;
  Vec3 prev_v = Vec3::Zero();
  double peak = 0.0;
  ReactionOutput o;
  for (int k = 0; k < 20000; ++k) {
    o = rc.step(k * dt, dt, Vec3::Zero(), Vec3::Zero(), k == 0, Vec2(1, 0),
                Vec3::Zero());
    peak = std::max(peak, (o.target_dot - prev_v).norm() / dt);
    prev_v = o.target_dot;
  }
  EXPECT_LE(peak, 1.0 + 1e-9);
  EXPECT_NEAR(o.target(0), 0.5, 1e-3);
}

TEST(Controller, DwellThenRemerge) {
  ReactionConfig c;
  c.accel_max = 0.0;
  ReactionController rc(c);
  const double dt = 0.01;
  const Vec3 plan(1.0, 1.0, 0.0);
  const double dwell = 5.0 * 1.25;
  bool back = false;
  for (int k = 0; k < 1200; ++k) {
    const double t = k * dt;
    const ReactionOutput o =
        rc.step(t, dt, plan, Vec3::Zero(), k == 0, Vec2(1, 0), plan);
    if (t < dwell - 1e-9) EXPECT_EQ(o.mode, ReactionMode::kEscape);
    if (t > dwell + 2.0 + 1e-9) {
      EXPECT_EQ(o.mode, ReactionMode::kTracking);
      EXPECT_EQ(o.target, plan);
      back = true;
    }
  }
  EXPECT_TRUE(back);
}

}  // namespace
}  // namespace omnisafe
